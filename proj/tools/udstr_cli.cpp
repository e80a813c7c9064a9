// SPDX-License-Identifier: Apache-2.0
//
// udstr: command-line front end for the decider, oracles, decoder and the
// reconciliation protocol.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include <udstr/bench.hpp>
#include <udstr/debruijn.hpp>
#include <udstr/decider.hpp>
#include <udstr/oracle.hpp>
#include <udstr/string_recon.hpp>

namespace {

using namespace udstr;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kInvalidParameter, "cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Raw argument bytes, or the contents of a file for `@path`.
std::string argument_bytes(const std::string& arg) {
    if (arg.size() > 1 && arg[0] == '@') return read_file(arg.substr(1));
    return arg;
}

int cmd_check(const std::string& input, const std::string& alphabet_arg, std::size_t q) {
    const Word w(argument_bytes(input));
    if (q < 2) throw Error(ErrorCode::kInvalidParameter, "--q must be at least 2");
    Verdict v;
    std::optional<std::size_t> at;
    if (q == 2) {
        const Alphabet alphabet = alphabet_arg.empty() ? Alphabet::observed(w.str()) : Alphabet(alphabet_arg);
        Decider d(alphabet);
        for (char c : w.str()) {
            v = d.push(c);
            if (!v.ud()) break;
        }
        at = d.rejected_at();
    } else {
        if (!alphabet_arg.empty()) Alphabet(alphabet_arg).validate(w.str());
        // Token j of the padded stream ends at character j of the word.
        TokenDecider d(q - 1);
        std::size_t j = 0;
        for (const auto& s : shingling(w, q).ordered) {
            v = d.push_edge(s);
            if (!v.ud()) {
                at = j + 1;
                break;
            }
            ++j;
        }
    }
    if (v.ud()) {
        std::cout << "UD\n";
        return 0;
    }
    std::cout << "NOT-UD " << to_string(*v.reason) << " at index " << *at << "\n";
    return 1;
}

int cmd_decode(const std::string& path, std::size_t l, std::uint64_t cap) {
    const auto multiset = ShingleMultiset::from_text(path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                                                 : read_file(path),
                                                     l);
    try {
        std::cout << decode_unique(DeBruijnGraph::build(multiset, l)).str() << "\n";
        return 0;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotUnique && e.code() != ErrorCode::kInconsistentMultiset) throw;
    }
    const auto count = decoding_count(multiset, cap);
    std::cout << "DECODINGS " << count.count << (count.count >= cap ? "+" : "") << "\n";
    for (const auto& w : count.witnesses) std::cout << w.str() << "\n";
    return 1;
}

int cmd_obstruct(const std::string& input) {
    const Word w(argument_bytes(input));
    if (const auto o = find_obstruction(w)) {
        std::cout << "OBSTRUCTION x=" << o->x << " a=" << o->a << " b=" << o->b << "\n";
        return 1;
    }
    std::cout << "NONE\n";
    return 0;
}

struct ReconArgs {
    std::string address;
    std::string input;
    std::string output;
    std::size_t l = 4;
    std::string mode = "rateless";
    std::size_t k = 8;
    std::uint64_t seed = 1;
    std::uint64_t modulus = PrimeField::kDefaultModulus;
    bool one_way = false;
    std::size_t sessions = 1;
};

SessionConfig session_config(const ReconArgs& a, Role role) {
    SessionConfig cfg;
    cfg.role = role;
    cfg.l = a.l;
    cfg.verification_points = a.k;
    cfg.seed = a.seed;
    cfg.modulus = a.modulus;
    cfg.two_way = !a.one_way;
    if (a.mode == "rateless") {
        cfg.mode = ReconMode::kRateless;
    } else if (a.mode.rfind("fixed:", 0) == 0) {
        cfg.mode = ReconMode::kFixed;
        try {
            cfg.bound = std::stoull(a.mode.substr(6));
        } catch (const std::exception&) {
            throw Error(ErrorCode::kInvalidParameter, "--mode expects fixed:<m> or rateless");
        }
    } else {
        throw Error(ErrorCode::kInvalidParameter, "--mode expects fixed:<m> or rateless");
    }
    return cfg;
}

int run_session(const ReconArgs& a, Role role, Endpoint& ep) {
    ReconSession session(Word(argument_bytes(a.input)), session_config(a, role));
    int status = 0;
    std::optional<Word> remote;
    try {
        remote = session.run(ep);
    } catch (const Error& e) {
        std::cerr << "udstr: " << e.what() << "\n";
        status = 2;
    }
    std::cout << session.report().to_text();
    if (remote && !a.output.empty()) {
        std::ofstream out(a.output, std::ios::binary);
        out << remote->str();
    }
    return status;
}

int cmd_serve(const ReconArgs& a) {
    SocketListener listener(a.address);
    std::cerr << "listening on port " << listener.port() << std::endl;
    int status = 0;
    for (std::size_t i = 0; i < a.sessions; ++i) {
        auto ep = listener.accept();
        status = std::max(status, run_session(a, Role::kResponder, *ep));
    }
    return status;
}

int cmd_connect(const ReconArgs& a) {
    auto ep = socket_connect(a.address, 5000);
    return run_session(a, Role::kInitiator, *ep);
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t sigma, std::size_t trials, std::uint64_t seed) {
    std::printf("%-10s %-6s %-6s %-12s %-14s %s\n", "n", "sigma", "trial", "seconds", "ns_per_symbol", "slots");
    std::vector<double> medians;
    for (auto n : sizes) {
        const auto r = bench_ud(n, sigma, trials, seed);
        for (std::size_t t = 0; t < r.seconds.size(); ++t) {
            std::printf("%-10zu %-6zu %-6zu %-12.6f %-14.3f %zu\n", n, sigma, t + 1, r.seconds[t],
                        n ? 1e9 * r.seconds[t] / static_cast<double>(n) : 0.0, r.slots);
        }
        std::printf("median n=%zu seconds=%.6f\n", n, r.median_seconds);
        medians.push_back(r.median_seconds);
    }
    for (std::size_t i = 1; i < medians.size(); ++i) {
        std::printf("ratio n=%zu/n=%zu %.3f\n", sizes[i], sizes[i - 1], medians[i] / medians[i - 1]);
    }
    return 0;
}

int cmd_gen(const std::string& kind, std::uint64_t seed, std::size_t q, const std::string& alphabet,
            std::size_t max_piece) {
    PevznerKind k;
    if (kind == "transpose") {
        k = PevznerKind::kTranspose;
    } else if (kind == "rotate") {
        k = PevznerKind::kRotate;
    } else {
        throw Error(ErrorCode::kInvalidParameter, "--kind expects transpose or rotate");
    }
    std::mt19937_64 rng(seed);
    const auto pair = random_pevzner(k, rng, Alphabet(alphabet), q, max_piece);
    std::cout << pair.x.str() << "\n" << pair.x_prime.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unique decodability of strings from their shingles, and shingle-based string reconciliation"};
    app.require_subcommand(1);
    int status = 0;

    std::string check_input, check_alphabet;
    std::size_t check_q = 2;
    auto* check = app.add_subcommand("check", "Stream a string through the unique-decodability decider");
    check->add_option("string", check_input, "Input string, or @path")->required();
    check->add_option("--alphabet", check_alphabet, "Explicit alphabet (bytes)");
    check->add_option("--q", check_q, "Shingle length")->check(CLI::Range(2, 64));
    check->callback([&] { status = cmd_check(check_input, check_alphabet, check_q); });

    std::string shingle_input;
    std::size_t shingle_l = 2;
    auto* shingle = app.add_subcommand("shingle", "Print the delimited shingle multiset of a string");
    shingle->add_option("string", shingle_input, "Input string, or @path")->required();
    shingle->add_option("--l", shingle_l, "Shingle length")->check(CLI::Range(2, 1 << 20));
    shingle->callback([&] { std::cout << shingling(Word(argument_bytes(shingle_input)), shingle_l).multiset.to_text(); });

    std::string decode_path;
    std::size_t decode_l = 2;
    std::uint64_t decode_cap = 2;
    auto* decode = app.add_subcommand("decode", "Decode a shingle multiset file");
    decode->add_option("multiset-file", decode_path, "Multiset in count<TAB>shingle form, or - for stdin")->required();
    decode->add_option("--l", decode_l, "Base shingle length")->check(CLI::Range(2, 1 << 20));
    decode->add_option("--count-cap", decode_cap, "Stop counting decodings at this many")->check(CLI::Range(1, 1 << 20));
    decode->callback([&] { status = cmd_decode(decode_path, decode_l, decode_cap); });

    std::string obstruct_input;
    auto* obstruct = app.add_subcommand("obstruct", "Search a string for an obstruction pattern");
    obstruct->add_option("string", obstruct_input, "Input string, or @path")->required();
    obstruct->callback([&] { status = cmd_obstruct(obstruct_input); });

    ReconArgs recon;
    auto* reconcile = app.add_subcommand("reconcile", "Run the string reconciliation protocol over TCP");
    reconcile->require_subcommand(1);
    auto add_recon_options = [&](CLI::App* sub) {
        sub->add_option("addr", recon.address, "host:port")->required();
        sub->add_option("--input", recon.input, "Local string, or @path")->required();
        sub->add_option("--output", recon.output, "Write the recovered remote string here");
        sub->add_option("--l", recon.l, "Shingle length")->check(CLI::Range(2, 1 << 20));
        sub->add_option("--mode", recon.mode, "fixed:<m> or rateless");
        sub->add_option("--k", recon.k, "Verification points");
        sub->add_option("--seed", recon.seed, "Session seed for evaluation points");
        sub->add_option("--modulus", recon.modulus, "Prime field modulus");
        sub->add_flag("--one-way", recon.one_way, "Only the connecting side learns the remote string");
    };
    auto* serve = reconcile->add_subcommand("serve", "Listen and answer sessions as the responder");
    add_recon_options(serve);
    serve->add_option("--sessions", recon.sessions, "Sessions to serve before exiting");
    serve->callback([&] { status = cmd_serve(recon); });
    auto* connect = reconcile->add_subcommand("connect", "Connect and run one session as the initiator");
    add_recon_options(connect);
    connect->callback([&] { status = cmd_connect(recon); });

    std::vector<std::size_t> bench_n{1000000, 2000000};
    std::size_t bench_sigma = 16, bench_trials = 5;
    std::uint64_t bench_seed = 1;
    auto* bench = app.add_subcommand("bench", "Benchmarks");
    bench->require_subcommand(1);
    auto* bench_ud_cmd = bench->add_subcommand("ud", "Decider throughput on random words");
    bench_ud_cmd->add_option("--n", bench_n, "Word lengths (repeatable)");
    bench_ud_cmd->add_option("--sigma", bench_sigma, "Alphabet size")->check(CLI::Range(1, 93));
    bench_ud_cmd->add_option("--trials", bench_trials, "Trials per length")->check(CLI::Range(1, 1000));
    bench_ud_cmd->add_option("--seed", bench_seed, "Random seed");
    bench_ud_cmd->callback([&] { status = cmd_bench(bench_n, bench_sigma, bench_trials, bench_seed); });

    std::string gen_kind = "transpose", gen_alphabet = "ab";
    std::uint64_t gen_seed = 1;
    std::size_t gen_q = 2, gen_max_piece = 4;
    auto* gen = app.add_subcommand("gen", "Generators");
    gen->require_subcommand(1);
    auto* pevzner = gen->add_subcommand("pevzner", "Emit two strings with equal q-gram multisets");
    pevzner->add_option("--kind", gen_kind, "transpose or rotate");
    pevzner->add_option("--seed", gen_seed, "Random seed");
    pevzner->add_option("--q", gen_q, "Shingle length")->check(CLI::Range(2, 64));
    pevzner->add_option("--alphabet", gen_alphabet, "Symbols to draw from");
    pevzner->add_option("--max-piece", gen_max_piece, "Longest free piece");
    pevzner->callback([&] { status = cmd_gen(gen_kind, gen_seed, gen_q, gen_alphabet, gen_max_piece); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "udstr: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "udstr: " << e.what() << "\n";
        return 2;
    }
    return status;
}

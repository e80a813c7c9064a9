// SPDX-License-Identifier: Apache-2.0

#include <udstr/transport.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>

namespace udstr {

std::string_view to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::kHello: return "HELLO";
        case FrameKind::kEvalBundle: return "EVAL_BUNDLE";
        case FrameKind::kEvalPair: return "EVAL_PAIR";
        case FrameKind::kDeltaReq: return "DELTA_REQ";
        case FrameKind::kDelta: return "DELTA";
        case FrameKind::kMerges: return "MERGES";
        case FrameKind::kDone: return "DONE";
        case FrameKind::kAbort: return "ABORT";
    }
    return "UNKNOWN";
}

FrameKind frame_kind_from_byte(std::uint8_t b) {
    if (b < 1 || b > 8) throw Error(ErrorCode::kProtocolError, "unknown frame kind " + std::to_string(b));
    return static_cast<FrameKind>(b);
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    if (frame.payload.size() > 0xffffffffULL) throw Error(ErrorCode::kProtocolError, "payload too large");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(frame.payload.size())).u8(static_cast<std::uint8_t>(frame.kind)).raw(frame.payload);
    return w.take();
}

Frame decode_frame(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    const std::uint32_t len = r.u32();
    const FrameKind kind = frame_kind_from_byte(r.u8());
    if (r.remaining() != len) {
        throw Error(ErrorCode::kProtocolError, "frame length " + std::to_string(len) + " does not match " +
                                                   std::to_string(r.remaining()) + " payload bytes");
    }
    return Frame{kind, r.raw(len)};
}

// ---------------------------------------------------------------------------

ByteWriter& ByteWriter::u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
}

ByteWriter& ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
}

ByteWriter& ByteWriter::raw(const std::vector<std::uint8_t>& bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
    return *this;
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::kProtocolError, "truncated payload");
}

std::uint8_t ByteReader::u8() {
    need(1);
    return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
}

std::string ByteReader::str() {
    const auto n = u32();
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
}

std::vector<std::uint8_t> ByteReader::raw(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> v(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return v;
}

void ByteReader::finish() const {
    if (remaining() != 0) throw Error(ErrorCode::kProtocolError, std::to_string(remaining()) + " trailing payload bytes");
}

// ---------------------------------------------------------------------------

void Endpoint::send(const Frame& frame) {
    const auto wire = encode_frame(frame);
    send_bytes(wire);
    bits_sent_ += 8 * wire.size();
}

Frame Endpoint::recv() {
    const auto wire = recv_bytes();
    bits_received_ += 8 * wire.size();
    return decode_frame(wire);
}

namespace {

struct Pipe {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> queue;
    bool closed = false;
};

class ChannelEndpoint : public Endpoint {
  public:
    ChannelEndpoint(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out) : in_(std::move(in)), out_(std::move(out)) {}
    ~ChannelEndpoint() override { close(); }

    void close() override {
        for (auto* p : {in_.get(), out_.get()}) {
            std::lock_guard lock(p->mu);
            p->closed = true;
            p->cv.notify_all();
        }
    }

  protected:
    void send_bytes(const std::vector<std::uint8_t>& wire) override {
        std::lock_guard lock(out_->mu);
        if (out_->closed) throw Error(ErrorCode::kTransportClosed, "peer closed the channel");
        out_->queue.push_back(wire);
        out_->cv.notify_all();
    }

    std::vector<std::uint8_t> recv_bytes() override {
        std::unique_lock lock(in_->mu);
        in_->cv.wait(lock, [&] { return !in_->queue.empty() || in_->closed; });
        if (in_->queue.empty()) throw Error(ErrorCode::kTransportClosed, "peer closed the channel");
        auto wire = std::move(in_->queue.front());
        in_->queue.pop_front();
        return wire;
    }

  private:
    std::shared_ptr<Pipe> in_;
    std::shared_ptr<Pipe> out_;
};

}  // namespace

std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> channel_pair() {
    auto ab = std::make_shared<Pipe>();
    auto ba = std::make_shared<Pipe>();
    return {std::make_unique<ChannelEndpoint>(ba, ab), std::make_unique<ChannelEndpoint>(ab, ba)};
}

}  // namespace udstr

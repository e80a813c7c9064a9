// SPDX-License-Identifier: Apache-2.0

#include <udstr/transport.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <thread>

namespace udstr {

namespace {

[[noreturn]] void throw_errno(ErrorCode code, const std::string& what) {
    throw Error(code, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const std::string& address) {
    const auto [host, port] = parse_address(address);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw Error(ErrorCode::kInvalidParameter, "cannot resolve host '" + host + "'");
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof(addr));
    freeaddrinfo(res);
    addr.sin_port = htons(port);
    return addr;
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        const ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw_errno(ErrorCode::kTransportClosed, "send");
        }
        data += w;
        n -= static_cast<std::size_t>(w);
    }
}

void read_all(int fd, std::uint8_t* data, std::size_t n) {
    while (n > 0) {
        const ssize_t r = ::recv(fd, data, n, 0);
        if (r == 0) throw Error(ErrorCode::kTransportClosed, "peer closed the connection");
        if (r < 0) {
            if (errno == EINTR) continue;
            throw_errno(ErrorCode::kTransportClosed, "recv");
        }
        data += r;
        n -= static_cast<std::size_t>(r);
    }
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
    const auto colon = address.rfind(':');
    const std::string host = colon == std::string::npos ? "127.0.0.1" : address.substr(0, colon);
    const std::string port_text = colon == std::string::npos ? address : address.substr(colon + 1);
    unsigned port = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535 || port_text.empty()) {
        throw Error(ErrorCode::kInvalidParameter, "bad address '" + address + "', expected host:port");
    }
    return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(port)};
}

SocketEndpoint::~SocketEndpoint() { close(); }

void SocketEndpoint::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void SocketEndpoint::send_bytes(const std::vector<std::uint8_t>& wire) {
    if (fd_ < 0) throw Error(ErrorCode::kTransportClosed, "endpoint is closed");
    write_all(fd_, wire.data(), wire.size());
}

std::vector<std::uint8_t> SocketEndpoint::recv_bytes() {
    if (fd_ < 0) throw Error(ErrorCode::kTransportClosed, "endpoint is closed");
    std::vector<std::uint8_t> wire(Frame::kFrameHeaderBytes);
    read_all(fd_, wire.data(), wire.size());
    frame_kind_from_byte(wire[4]);
    const std::uint32_t len = (std::uint32_t{wire[0]} << 24) | (std::uint32_t{wire[1]} << 16) |
                              (std::uint32_t{wire[2]} << 8) | std::uint32_t{wire[3]};
    wire.resize(Frame::kFrameHeaderBytes + len);
    read_all(fd_, wire.data() + Frame::kFrameHeaderBytes, len);
    return wire;
}

SocketListener::SocketListener(const std::string& address) {
    sockaddr_in addr = resolve(address);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw_errno(ErrorCode::kTransportClosed, "socket");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        const int saved = errno;
        ::close(fd_);
        errno = saved;
        throw_errno(ErrorCode::kTransportClosed, "bind " + address);
    }
    if (::listen(fd_, 8) < 0) throw_errno(ErrorCode::kTransportClosed, "listen");
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<SocketEndpoint> SocketListener::accept() {
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            return std::make_unique<SocketEndpoint>(fd);
        }
        if (errno != EINTR) throw_errno(ErrorCode::kTransportClosed, "accept");
    }
}

std::unique_ptr<SocketEndpoint> socket_connect(const std::string& address, int retry_ms) {
    const sockaddr_in addr = resolve(address);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(retry_ms);
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw_errno(ErrorCode::kTransportClosed, "socket");
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            return std::make_unique<SocketEndpoint>(fd);
        }
        const int saved = errno;
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            errno = saved;
            throw_errno(ErrorCode::kTransportClosed, "connect " + address);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

}  // namespace udstr

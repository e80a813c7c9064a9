// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <udstr/error.hpp>

namespace udstr {

enum class FrameKind : std::uint8_t {
    kHello = 1,
    kEvalBundle = 2,
    kEvalPair = 3,
    kDeltaReq = 4,
    kDelta = 5,
    kMerges = 6,
    kDone = 7,
    kAbort = 8,
};

std::string_view to_string(FrameKind kind);

/// Wire form: 4-byte big-endian payload length, 1-byte kind, payload.
struct Frame {
    FrameKind kind;
    std::vector<std::uint8_t> payload;

    std::size_t wire_bytes() const { return kFrameHeaderBytes + payload.size(); }
    static constexpr std::size_t kFrameHeaderBytes = 5;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
/// Parses exactly one frame. Throws kProtocolError on a short buffer, trailing
/// bytes, a length mismatch or an unknown kind.
Frame decode_frame(const std::vector<std::uint8_t>& bytes);
/// Throws kProtocolError for bytes that are not a frame kind.
FrameKind frame_kind_from_byte(std::uint8_t b);

/// Big-endian payload builder.
class ByteWriter {
  public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    /// u32 length followed by the bytes.
    ByteWriter& str(std::string_view s);
    ByteWriter& raw(const std::vector<std::uint8_t>& bytes);

    std::vector<std::uint8_t>& bytes() { return out_; }
    std::vector<std::uint8_t> take() { return std::move(out_); }

  private:
    std::vector<std::uint8_t> out_;
};

/// Big-endian payload reader; throws kProtocolError when reading past the end.
class ByteReader {
  public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::string str();
    std::vector<std::uint8_t> raw(std::size_t n);

    std::size_t remaining() const { return bytes_.size() - pos_; }
    /// Throws kProtocolError unless every byte was consumed.
    void finish() const;

  private:
    void need(std::size_t n) const;

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

/// One side of a reliable, ordered, metered frame connection.
class Endpoint {
  public:
    virtual ~Endpoint() = default;

    /// Throws kTransportClosed once the peer is gone.
    void send(const Frame& frame);
    Frame recv();
    virtual void close() = 0;

    /// Exact on-wire bits, headers included.
    std::uint64_t bits_sent() const { return bits_sent_; }
    std::uint64_t bits_received() const { return bits_received_; }

  protected:
    virtual void send_bytes(const std::vector<std::uint8_t>& wire) = 0;
    /// Next complete frame in wire form.
    virtual std::vector<std::uint8_t> recv_bytes() = 0;

  private:
    std::uint64_t bits_sent_ = 0;
    std::uint64_t bits_received_ = 0;
};

/// Two connected in-process endpoints. Sends never block.
std::pair<std::unique_ptr<Endpoint>, std::unique_ptr<Endpoint>> channel_pair();

/// TCP endpoint over a connected socket; owns the descriptor.
class SocketEndpoint : public Endpoint {
  public:
    explicit SocketEndpoint(int fd) : fd_(fd) {}
    ~SocketEndpoint() override;
    SocketEndpoint(const SocketEndpoint&) = delete;
    SocketEndpoint& operator=(const SocketEndpoint&) = delete;

    void close() override;

  protected:
    void send_bytes(const std::vector<std::uint8_t>& wire) override;
    std::vector<std::uint8_t> recv_bytes() override;

  private:
    int fd_;
};

/// Listening TCP socket bound to `host:port` (port 0 picks a free port).
class SocketListener {
  public:
    explicit SocketListener(const std::string& address);
    ~SocketListener();
    SocketListener(const SocketListener&) = delete;
    SocketListener& operator=(const SocketListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<SocketEndpoint> accept();

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connects to `host:port`, retrying for up to `retry_ms` while the peer is not listening.
std::unique_ptr<SocketEndpoint> socket_connect(const std::string& address, int retry_ms = 0);

/// Splits `host:port`; a bare port means localhost. Throws kInvalidParameter.
std::pair<std::string, std::uint16_t> parse_address(const std::string& address);

}  // namespace udstr

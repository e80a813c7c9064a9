// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace udstr {

enum class ErrorCode {
    kInvalidParameter,
    kInvalidSymbol,
    kInvalidToken,
    kOverlapMismatch,
    kInvalidShingle,
    kInvalidMerge,
    kInconsistentMultiset,
    kNotUnique,
    kProtocolMisuse,
    kEncodingCapacity,
    kInvalidPoint,
    kBoundExceeded,
    kPointCollision,
    kCapacity,
    kTransportClosed,
    kProtocolError,
    kSessionAbort,
    kNeedsLargerBound,
    kParseError,
};

std::string_view to_string(ErrorCode code);

/// `0xNN` rendering of a byte for messages.
inline std::string hex_byte(char c) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const auto b = static_cast<unsigned char>(c);
    return {'0', 'x', kDigits[b >> 4], kDigits[b & 15]};
}

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace udstr

#pragma once

// SHA-256 and SHAKE256 behind a minimal interface. Transcripts depend only on
// the standard outputs, pinned by test vectors in tests/unit/test_crypto.cpp.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kickmix::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// SHAKE256 XOF: absorb once, then squeeze any number of bytes in sequence.
class Shake256 {
 public:
  explicit Shake256(std::span<const std::uint8_t> seed);
  ~Shake256();
  Shake256(Shake256&&) noexcept;
  Shake256& operator=(Shake256&&) noexcept;
  Shake256(const Shake256&) = delete;
  Shake256& operator=(const Shake256&) = delete;

  /// Next `n` bytes of the output stream.
  std::vector<std::uint8_t> squeeze(std::size_t n);

 private:
  void refill(std::size_t needed);

  std::vector<std::uint8_t> seed_;
  std::vector<std::uint8_t> buffer_;
  std::size_t offset_ = 0;
};

/// Convenience: first `n` bytes of SHAKE256(seed).
std::vector<std::uint8_t> shake256(std::span<const std::uint8_t> seed, std::size_t n);

}  // namespace kickmix::crypto

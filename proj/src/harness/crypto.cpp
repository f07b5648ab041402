#include "kickmix/crypto.hpp"

#include <stdexcept>

#include <openssl/evp.h>

namespace kickmix::crypto {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

void digest_into(const EVP_MD* md, std::span<const std::uint8_t> data, std::uint8_t* out, std::size_t out_len,
                 bool xof) {
  MdCtx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1) {
    throw std::runtime_error("OpenSSL digest initialisation failed");
  }
  int ok = 0;
  if (xof) {
    ok = EVP_DigestFinalXOF(ctx.get(), out, out_len);
  } else {
    unsigned int len = 0;
    ok = EVP_DigestFinal_ex(ctx.get(), out, &len);
    ok = ok == 1 && len == out_len ? 1 : 0;
  }
  if (ok != 1) throw std::runtime_error("OpenSSL digest finalisation failed");
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  Digest d{};
  digest_into(EVP_sha256(), data, d.data(), d.size(), false);
  return d;
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

Shake256::Shake256(std::span<const std::uint8_t> seed) : seed_(seed.begin(), seed.end()) {}
Shake256::~Shake256() = default;
Shake256::Shake256(Shake256&&) noexcept = default;
Shake256& Shake256::operator=(Shake256&&) noexcept = default;

// OpenSSL 3.0 finalises an XOF only once, so the stream is regenerated at a
// larger length when exhausted; XOF outputs are prefixes of one another.
void Shake256::refill(std::size_t needed) {
  std::size_t len = std::max<std::size_t>(buffer_.size() * 2, 136);
  while (len < needed) len *= 2;
  buffer_.resize(len);
  digest_into(EVP_shake256(), seed_, buffer_.data(), len, true);
}

std::vector<std::uint8_t> Shake256::squeeze(std::size_t n) {
  if (offset_ + n > buffer_.size()) refill(offset_ + n);
  std::vector<std::uint8_t> out(buffer_.begin() + static_cast<std::ptrdiff_t>(offset_),
                                buffer_.begin() + static_cast<std::ptrdiff_t>(offset_ + n));
  offset_ += n;
  return out;
}

std::vector<std::uint8_t> shake256(std::span<const std::uint8_t> seed, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  if (n > 0) digest_into(EVP_shake256(), seed, out.data(), n, true);
  return out;
}

}  // namespace kickmix::crypto

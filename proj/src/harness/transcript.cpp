#include <boost/multiprecision/cpp_bin_float.hpp>

#include "kickmix/harness.hpp"

namespace kickmix::harness {

namespace {

BigInt big_endian(const std::vector<std::uint8_t>& bytes) {
  BigInt v = 0;
  for (std::uint8_t b : bytes) v = (v << 8) | b;
  return v;
}

}  // namespace

crypto::Digest commit(std::span<const std::uint8_t> circuit_bytes) { return crypto::sha256(circuit_bytes); }

Transcript derive_tests(std::span<const std::uint8_t> circuit_bytes, const VerificationSpec& spec,
                        const ec::CurveParams& curve, unsigned window_bits) {
  Transcript t;
  t.commitment = commit(circuit_bytes);
  const CircuitKind kind = spec.kind();
  if (kind == CircuitKind::Windowed && (window_bits < 1 || window_bits > 32)) {
    throw HarnessError("window register must be 1 to 32 bits wide");
  }
  crypto::Shake256 master(circuit_bytes);
  const std::size_t scalar_bytes = (curve.order_bits() + 7) / 8;
  const std::size_t window_bytes = (window_bits + 7) / 8;
  t.tests.reserve(spec.test_count);
  for (std::uint64_t i = 0; i < spec.test_count; ++i) {
    TestCase tc;
    tc.index = i;
    tc.acc_scalar = big_endian(master.squeeze(scalar_bytes)) % curve.order;
    if (kind == CircuitKind::TwoPoint) {
      tc.point_scalar = big_endian(master.squeeze(scalar_bytes)) % curve.order;
    } else if (kind == CircuitKind::Windowed) {
      BigInt idx = big_endian(master.squeeze(window_bytes)) % (BigInt{1} << window_bits);
      tc.window = idx.convert_to<std::uint64_t>();
    }
    t.tests.push_back(std::move(tc));
  }
  return t;
}

std::vector<std::uint8_t> measurement_stream(const crypto::Digest& commitment, std::uint64_t index,
                                             std::size_t bytes) {
  std::vector<std::uint8_t> seed(commitment.begin(), commitment.end());
  for (int shift = 56; shift >= 0; shift -= 8) seed.push_back(static_cast<std::uint8_t>(index >> shift));
  return crypto::shake256(seed, bytes);
}

std::uint64_t required_test_count(double epsilon, double security_bits) {
  using Float = boost::multiprecision::cpp_bin_float_50;
  if (!(epsilon > 0 && epsilon < 1)) throw HarnessError("epsilon must be in (0, 1)");
  if (!(security_bits > 0)) throw HarnessError("security bits must be positive");
  const Float per_test = -log(Float(1) - Float(epsilon)) / log(Float(2));
  const Float lambda(security_bits);
  Float estimate = ceil(lambda / per_test);
  if (estimate > Float(1e18)) throw HarnessError("required test count overflows");
  auto n = estimate.convert_to<std::uint64_t>();
  while (n > 1 && Float(n - 1) * per_test >= lambda) --n;
  while (Float(n) * per_test < lambda) ++n;
  return n;
}

double achieved_security_bits(double epsilon, std::uint64_t tests) {
  if (!(epsilon >= 0 && epsilon < 1)) throw HarnessError("epsilon must be in [0, 1)");
  return -static_cast<double>(tests) * std::log2(1.0 - epsilon);
}

}  // namespace kickmix::harness

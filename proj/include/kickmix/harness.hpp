#pragma once

// Fiat-Shamir fuzz verification of point-addition circuits.
//
// Transcript layout (all byte strings are raw, no canonicalization):
//
//   commitment  = SHA-256(circuit bytes)
//   master      = SHAKE256(circuit bytes), read front to back
//   for i in 0..N-1, in order:
//     accumulator scalar  ceil(order_bits/8) bytes, big-endian, mod order
//     then, two-point circuits: point scalar, same encoding
//     or,   windowed circuits:  window index, ceil(w/8) bytes, big-endian, mod 2^w
//   measurement bits of test i = SHAKE256(commitment || be64(i)),
//     bit j of the circuit's j-th MX is bit (j mod 8) of byte j/8
//
// Test points are scalar * generator. docs/transcript.md walks through one
// example byte by byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kickmix/batch.hpp"
#include "kickmix/crypto.hpp"
#include "kickmix/ec.hpp"
#include "kickmix/ir.hpp"

namespace kickmix::harness {

class HarnessError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Names of the circuit registers that hold each operand. The circuit kind
/// follows from which optional fields are set: `window` for windowed adders,
/// `point_x`/`point_y` for two-point adders, neither for fixed-point adders.
struct RegisterMap {
  std::string acc_x = "qx";
  std::string acc_y = "qy";
  std::optional<std::string> point_x;
  std::optional<std::string> point_y;
  std::optional<std::string> window;
};

enum class CircuitKind { FixedPoint, TwoPoint, Windowed };
enum class BaseSource { Generator, Metadata };

struct VerificationSpec {
  std::string curve = "toy-p11-b7";
  RegisterMap registers;
  BaseSource base = BaseSource::Metadata;
  std::uint64_t test_count = 64;
  std::optional<double> max_non_clifford;  // average executed per test
  std::optional<std::uint64_t> max_qubits;
  std::optional<std::uint64_t> max_total_ops;
  double epsilon = 0.01;
  double security_bits = 128;
  /// Pass with up to floor(epsilon * N) failing tests instead of none.
  bool allow_failures = false;
  bool exhaustive = false;
  unsigned branch_limit = 16;

  CircuitKind kind() const;
};

VerificationSpec parse_spec(const nlohmann::json& j);
nlohmann::json spec_to_json(const VerificationSpec& s);

crypto::Digest commit(std::span<const std::uint8_t> circuit_bytes);

struct TestCase {
  std::uint64_t index = 0;
  BigInt acc_scalar = 0;
  std::optional<BigInt> point_scalar;
  std::optional<std::uint64_t> window;
};

struct Transcript {
  crypto::Digest commitment{};
  std::vector<TestCase> tests;
};

/// Draws N test cases; `window_bits` is only read for windowed specs.
Transcript derive_tests(std::span<const std::uint8_t> circuit_bytes, const VerificationSpec& spec,
                        const ec::CurveParams& curve, unsigned window_bits = 0);

/// First `bytes` bytes of SHAKE256(commitment || be64(index)).
std::vector<std::uint8_t> measurement_stream(const crypto::Digest& commitment, std::uint64_t index,
                                             std::size_t bytes);

/// Smallest N with (1 - epsilon)^N <= 2^-lambda.
std::uint64_t required_test_count(double epsilon, double security_bits);
/// -N log2(1 - epsilon).
double achieved_security_bits(double epsilon, std::uint64_t tests);

struct VerifyOptions {
  unsigned jobs = 1;
  sim::Kernel kernel = sim::Kernel::Auto;
  std::size_t chunk_lanes = 256;
};

enum class TestStatus { Pass, Fail, Skipped, Wrapped };

struct TestResult {
  std::uint64_t index = 0;
  TestStatus status = TestStatus::Pass;
  bool exceptional = false;
  bool output_match = true;
  bool phase_ok = true;
  bool inputs_preserved = true;
  std::string acc;       // accumulator Q, formatted
  std::string operand;   // P added to Q (window entry or second point)
  std::string expected;
  std::string actual;
  std::optional<std::uint64_t> window;
  // Executed non-Clifford count; a branch average in exhaustive mode.
  BigInt nc_num = 0;
  BigInt nc_den = 1;
};

struct VerificationReport {
  std::string commitment_hex;
  VerificationSpec spec;
  CircuitKind kind = CircuitKind::FixedPoint;
  std::string base;  // formatted base / addend point for fixed-point and windowed circuits
  std::vector<TestResult> tests;
  ir::StaticResources resources;
  BigInt avg_nc_num = 0;
  BigInt avg_nc_den = 1;
  std::uint64_t failures = 0;
  std::uint64_t skipped = 0;
  std::uint64_t wrapped = 0;
  std::uint64_t wrapped_mismatches = 0;
  bool non_clifford_ok = true, qubits_ok = true, total_ops_ok = true;
  std::vector<std::string> warnings;
  bool pass = false;

  /// Canonical body: sorted keys, no timestamps.
  nlohmann::json body() const;
  /// {"report": body, "report_digest": sha256(compact body)}.
  nlohmann::json envelope() const;
  std::string digest_hex() const;
};

/// Runs the fuzz test. Throws HarnessError on a register mapping mismatch or
/// an unusable spec, ir::ParseError when the bytes do not parse.
VerificationReport verify(std::span<const std::uint8_t> circuit_bytes, const VerificationSpec& spec,
                          const VerifyOptions& options = {});
VerificationReport verify(const ir::Circuit& circuit, std::span<const std::uint8_t> circuit_bytes,
                          const VerificationSpec& spec, const VerifyOptions& options = {});

/// Indented canonical JSON with a trailing newline.
std::string canonical_dump(const nlohmann::json& j);

/// "a/b" in lowest terms ("a" when b = 1) and a fixed six-decimal rendering.
std::string rational_string(const BigInt& num, const BigInt& den);
std::string fixed6(const BigInt& num, const BigInt& den);

}  // namespace kickmix::harness

#pragma once

// Basis-state simulation of kickmix circuits.
//
// A kickmix circuit applied to a computational basis state keeps it a basis
// state up to a global sign, so the state is a bit vector plus a phase in
// {+1, -1}. MX on qubit q draws r from the caller's bit source; r = 1 means
// the |-> outcome and multiplies the phase by (-1)^bits[q]. Either way the
// qubit is reset to 0 and cbits[dest] = r.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kickmix/ec.hpp"
#include "kickmix/ir.hpp"

namespace kickmix::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source of measurement outcomes. The simulator owns no entropy.
class BitSource {
 public:
  virtual ~BitSource() = default;
  /// Next outcome; throws SimError when the stream is exhausted.
  virtual bool next() = 0;
};

class VectorBitSource final : public BitSource {
 public:
  explicit VectorBitSource(std::vector<bool> bits) : bits_(std::move(bits)) {}
  bool next() override;
  std::size_t consumed() const { return pos_; }

 private:
  std::vector<bool> bits_;
  std::size_t pos_ = 0;
};

/// Bits taken LSB-first from each byte of a buffer.
class ByteBitSource final : public BitSource {
 public:
  explicit ByteBitSource(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  bool next() override;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

using RegisterValues = std::map<std::string, BigInt, std::less<>>;

struct RunResult {
  RegisterValues outputs;
  int phase = 1;
  std::vector<bool> measurements;  // outcome of each MX, in execution order
  std::vector<bool> bits;          // final value of every qubit
  std::uint64_t executed_non_clifford = 0;
  std::uint64_t executed_total = 0;

  bool operator==(const RunResult&) const = default;
};

/// Mutable simulator state; the scalar reference every batch kernel is tested
/// against.
class SimState {
 public:
  SimState(std::uint32_t qubits, std::uint32_t cbits);

  void apply(const ir::Gate& gate, BitSource& rng);

  std::vector<bool>& bits() { return bits_; }
  const std::vector<bool>& bits() const { return bits_; }
  int phase() const { return phase_; }
  const std::vector<bool>& cbits() const { return cbits_; }
  const std::vector<bool>& measurements() const { return record_; }
  std::uint64_t executed_non_clifford() const { return executed_non_clifford_; }
  std::uint64_t executed_total() const { return executed_total_; }

  /// Kickback coefficients tracked per measurement: for each MX the value of
  /// the measured qubit, XOR the operand products of every diagonal gate
  /// conditioned on its bit. Used by branch analysis.
  const std::vector<bool>& kickback() const { return kick_; }
  void track_kickback(bool on) { track_kick_ = on; }

 private:
  std::vector<bool> bits_;
  std::vector<bool> cbits_;
  std::vector<bool> written_;
  std::vector<std::uint32_t> cbit_to_measurement_;
  std::vector<bool> record_;
  std::vector<bool> kick_;
  int phase_ = 1;
  std::uint64_t executed_non_clifford_ = 0;
  std::uint64_t executed_total_ = 0;
  bool track_kick_ = false;
};

/// Loads register values into a bit vector. Throws SimError when the value set
/// does not match `regs` exactly or a value overflows its register.
void load_registers(const std::vector<ir::Register>& regs, const RegisterValues& values, std::vector<bool>& bits);
RegisterValues read_registers(const std::vector<ir::Register>& regs, const std::vector<bool>& bits);

/// Runs `circuit` on the basis input, drawing one outcome per MX from `rng`.
/// When `trace` is given, one line per executed gate is written to it.
RunResult run(const ir::Circuit& circuit, const RegisterValues& input, BitSource& rng,
              std::ostream* trace = nullptr);

inline constexpr unsigned kDefaultBranchLimit = 20;

/// One result per measurement-outcome string, enumerated in counting order
/// (bit i of the branch index is the outcome of the i-th MX).
std::vector<RunResult> run_all_measurement_branches(const ir::Circuit& circuit, const RegisterValues& input,
                                                    unsigned branch_limit = kDefaultBranchLimit);

}  // namespace kickmix::sim

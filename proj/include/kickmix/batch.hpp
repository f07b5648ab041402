#pragma once

// Bit-sliced multi-lane simulation.
//
// Each lane is an independent basis-state run on its own input and its own
// measurement outcomes. Lanes are packed 64 per machine word so every gate is
// a handful of word-wide boolean operations. Three interchangeable kernels
// execute the same program:
//
//   Scalar   - lane-by-lane SimState, the reference
//   Portable - 64-bit words, plain C++
//   Avx2     - 256-bit words, selected at runtime when the CPU supports it
//
// All kernels produce identical results; tests/unit/test_kernels.cpp checks
// this on random circuits.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kickmix/ir.hpp"
#include "kickmix/sim.hpp"

namespace kickmix::sim {

namespace detail {

// Compiled gate. Conditions refer to measurement indices, since a classical
// bit is exactly the outcome of the one MX that writes it.
struct Op {
  ir::GateKind kind;
  bool conditioned;
  bool cond_value;
  std::uint32_t q0, q1, q2;
  std::uint32_t cond_measurement;
  std::uint32_t measurement;  // MX only
};

std::vector<Op> compile(const ir::Circuit& circuit);

}  // namespace detail

enum class Kernel { Auto, Scalar, Portable, Avx2 };

std::string_view kernel_name(Kernel kernel);
std::optional<Kernel> parse_kernel(std::string_view name);
bool kernel_available(Kernel kernel);
/// Auto resolves to $KICKMIX_KERNEL when set, else Avx2 if available, else
/// Portable. Requesting an unavailable kernel throws SimError.
Kernel resolve_kernel(Kernel requested);

enum class BatchMode {
  /// Measurement outcomes come from the per-lane bits set by the caller.
  Sample,
  /// Every outcome is taken as 0 and the kickback coefficient of each
  /// measurement is accumulated instead; see phase_varies().
  BranchAnalysis,
};

/// True when every classically conditioned gate is diagonal. For such
/// circuits data bits never depend on measurement outcomes and the phase
/// exponent is affine in them, which BranchAnalysis relies on.
bool branch_analyzable(const ir::Circuit& circuit);

class Batch {
 public:
  Batch(const ir::Circuit& circuit, std::size_t lanes);

  std::size_t lanes() const { return lanes_; }
  std::size_t measurement_count() const { return measurements_; }

  void set_input(std::size_t lane, const RegisterValues& values);
  void set_qubit(std::size_t lane, ir::Qubit q, bool value);
  /// Measurement outcomes for one lane, LSB-first per byte.
  void set_measurements(std::size_t lane, std::span<const std::uint8_t> bytes);
  void set_measurement(std::size_t lane, std::size_t index, bool outcome);

  void run(Kernel kernel = Kernel::Auto, BatchMode mode = BatchMode::Sample);

  bool qubit(std::size_t lane, ir::Qubit q) const;
  int phase(std::size_t lane) const;
  bool measurement(std::size_t lane, std::size_t index) const;
  std::uint64_t executed_non_clifford(std::size_t lane) const;
  std::uint64_t executed_total(std::size_t lane) const;
  BigInt read(std::size_t lane, const ir::Register& reg) const;
  RegisterValues outputs(std::size_t lane) const;

  /// After a BranchAnalysis run: true when some measurement branch of this
  /// lane ends with a phase different from phase(lane). In that case exactly
  /// half of all branches end with phase -1.
  bool phase_varies(std::size_t lane) const;

  /// Kernel used by the last run().
  Kernel last_kernel() const { return last_kernel_; }

 private:
  bool get(const std::vector<std::uint64_t>& rows, std::size_t row, std::size_t lane) const;
  static void put(std::vector<std::uint64_t>& rows, std::size_t words, std::size_t row, std::size_t lane, bool v);
  void run_scalar(BatchMode mode);
  std::uint64_t counter(const std::vector<std::uint64_t>& planes, std::size_t lane) const;

  const ir::Circuit* circuit_;
  std::vector<detail::Op> program_;
  std::size_t lanes_;
  std::size_t words_;
  std::size_t measurements_;
  unsigned planes_;
  std::uint64_t unconditioned_non_clifford_ = 0;
  std::uint64_t unconditioned_total_ = 0;

  std::vector<std::uint64_t> input_;  // qubits x words
  std::vector<std::uint64_t> rng_;    // measurements x words
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> phase_;
  std::vector<std::uint64_t> cond_nc_;
  std::vector<std::uint64_t> cond_total_;
  std::vector<std::uint64_t> kick_;
  std::vector<std::uint64_t> varies_;
  Kernel last_kernel_ = Kernel::Auto;
  bool ran_ = false;
  BatchMode last_mode_ = BatchMode::Sample;
};

}  // namespace kickmix::sim

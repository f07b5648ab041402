#pragma once

// Closed-form resource and attack-timing arithmetic for the full-size ECDLP
// circuit: windowed Toffoli/qubit totals, reaction-limited runtime, T-factory
// sizing, the on-spend race and the salvage timeline.
//
// Durations are std::chrono::nanoseconds so the reference figures come out
// exact; probabilities are doubles.

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kickmix::cost {

using Nanos = std::chrono::nanoseconds;

class CostError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PointAddCost {
  std::uint64_t pa_toffoli = 0;
  std::uint64_t pa_qubits = 0;
  unsigned n = 256;
  unsigned w = 16;
};

/// ceil(2n / w) - 4. Throws CostError when not positive.
std::uint64_t windowed_additions(unsigned n, unsigned w);

/// (PA_Toff + 3 * 2^w) * windowed_additions(n, w).
std::uint64_t ecdlp_toffoli(const PointAddCost& c);

/// PA_Qubits + w.
std::uint64_t ecdlp_qubits(const PointAddCost& c);

/// argmin over w in [1, floor(2n/5)] of ecdlp_toffoli, skipping windows with
/// a non-positive schedule. Ties go to the smaller window.
unsigned optimal_window(const std::function<std::uint64_t(unsigned)>& pa_toffoli_of_w, unsigned n);

struct MachineProfile {
  Nanos reaction_time{10'000};
  double toffoli_overhead_fraction = 0.5;
  Nanos round_time{1'000};
  std::uint64_t t_state_cost = 50'000;  // qubit-rounds per T state
  std::uint64_t cultivation_qubits = 10'000;
  double toffoli_to_t_factor = 1.0;
};

void validate(const MachineProfile& m);

/// toffoli * reaction_time * (1 + overhead).
Nanos runtime(std::uint64_t toffoli, const MachineProfile& m);

/// Half of the full runtime; rejects zero.
Nanos primed_attack_time(Nanos full_runtime);

/// Physical qubits needed to sustain `t_rate` T states per second.
double t_factory_qubits(double t_rate, const MachineProfile& m);

/// T states per second produced by m.cultivation_qubits.
double t_rate_from_cultivation(const MachineProfile& m);

/// Cultivation-limited time to derive one key with `toffoli` gates.
Nanos slow_clock_key_time(std::uint64_t toffoli, const MachineProfile& m);

struct AttackScenario {
  Nanos attack_time{540'000'000'000};
  Nanos block_interval{600'000'000'000};
  std::uint64_t signatures_required = 1;
  std::uint64_t machines = 1;
};

/// exp(-effective_time / tau) where the effective time is the attack time
/// stretched by ceil(m / machines).
double onspend_success(const AttackScenario& s);

/// Additions one machine performs when `total` are split across `machines`.
using PartitionFunction = std::function<std::uint64_t(std::uint64_t machines, std::uint64_t total)>;

/// Every machine repeats a fixed prefix of `overhead` additions and takes a
/// ceil share of the rest.
PartitionFunction overhead_partition(std::uint64_t overhead);

inline constexpr std::uint64_t kDefaultPartitionOverhead = 14;

/// total / partition(machines, total).
double multi_machine_speedup(std::uint64_t machines, std::uint64_t total_point_additions,
                             const PartitionFunction& partition = overhead_partition(kDefaultPartitionOverhead));

struct WalletRecord {
  double balance = 0;
  std::uint64_t keys_required = 1;
  std::string label;
};

struct SalvagePoint {
  Nanos time{0};
  double cumulative_balance = 0;
  std::string label;
};

/// Richest-first cumulative harvest, one point per wallet (stable for equal
/// balances). An empty list gives an empty curve.
std::vector<SalvagePoint> salvage_timeline(std::vector<WalletRecord> wallets, Nanos per_key_time);

/// Same accumulation in the given order.
std::vector<SalvagePoint> salvage_in_order(const std::vector<WalletRecord>& wallets, Nanos per_key_time);

double to_seconds(Nanos t);
Nanos from_seconds(double seconds);

}  // namespace kickmix::cost

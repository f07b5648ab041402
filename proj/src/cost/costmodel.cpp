#include <algorithm>
#include <cmath>
#include <limits>

#include "kickmix/cost.hpp"

namespace kickmix::cost {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw CostError("integer overflow");
  return a * b;
}

}  // namespace

std::uint64_t windowed_additions(unsigned n, unsigned w) {
  if (w == 0) throw CostError("window must be positive");
  const std::uint64_t steps = (2ULL * n + w - 1) / w;
  if (steps <= 4) {
    throw CostError("schedule 2n/w - 4 is not positive for n=" + std::to_string(n) + ", w=" + std::to_string(w));
  }
  return steps - 4;
}

std::uint64_t ecdlp_toffoli(const PointAddCost& c) {
  const std::uint64_t additions = windowed_additions(c.n, c.w);
  if (c.w >= 62) throw CostError("window too large");
  const std::uint64_t lookup = 3ULL << c.w;
  return checked_mul(c.pa_toffoli + lookup, additions);
}

std::uint64_t ecdlp_qubits(const PointAddCost& c) { return c.pa_qubits + c.w; }

unsigned optimal_window(const std::function<std::uint64_t(unsigned)>& pa_toffoli_of_w, unsigned n) {
  const unsigned hi = 2 * n / 5;
  unsigned best = 0;
  std::uint64_t best_cost = 0;
  for (unsigned w = 1; w <= hi && w < 62; ++w) {
    if ((2ULL * n + w - 1) / w <= 4) continue;
    std::uint64_t cost = 0;
    try {
      cost = ecdlp_toffoli({pa_toffoli_of_w(w), 0, n, w});
    } catch (const CostError&) {
      continue;  // overflows 64 bits, so never the minimum
    }
    if (best == 0 || cost < best_cost) {
      best = w;
      best_cost = cost;
    }
  }
  if (best == 0) throw CostError("no feasible window for n=" + std::to_string(n));
  return best;
}

void validate(const MachineProfile& m) {
  if (m.reaction_time <= Nanos::zero() || m.round_time <= Nanos::zero() || m.t_state_cost == 0 ||
      m.cultivation_qubits == 0 || !(m.toffoli_to_t_factor > 0) || !(m.toffoli_overhead_fraction >= 0)) {
    throw CostError("machine profile values must be positive");
  }
}

Nanos runtime(std::uint64_t toffoli, const MachineProfile& m) {
  const std::uint64_t base = checked_mul(toffoli, static_cast<std::uint64_t>(m.reaction_time.count()));
  const auto extra = static_cast<std::uint64_t>(std::llround(static_cast<long double>(base) * m.toffoli_overhead_fraction));
  return Nanos(static_cast<Nanos::rep>(base + extra));
}

Nanos primed_attack_time(Nanos full_runtime) {
  if (full_runtime <= Nanos::zero()) throw CostError("runtime must be positive");
  return full_runtime / 2;
}

double t_factory_qubits(double t_rate, const MachineProfile& m) {
  if (t_rate < 0) throw CostError("T rate must be non-negative");
  return t_rate * static_cast<double>(m.t_state_cost) * static_cast<double>(m.round_time.count()) / 1e9;
}

double t_rate_from_cultivation(const MachineProfile& m) {
  return static_cast<double>(m.cultivation_qubits) * 1e9 /
         (static_cast<double>(m.t_state_cost) * static_cast<double>(m.round_time.count()));
}

Nanos slow_clock_key_time(std::uint64_t toffoli, const MachineProfile& m) {
  validate(m);
  const double t_states = static_cast<double>(toffoli) * m.toffoli_to_t_factor;
  return from_seconds(t_states / t_rate_from_cultivation(m));
}

double onspend_success(const AttackScenario& s) {
  if (s.attack_time < Nanos::zero() || s.block_interval <= Nanos::zero()) {
    throw CostError("attack time must be non-negative and block interval positive");
  }
  if (s.signatures_required == 0 || s.machines == 0) throw CostError("signatures and machines must be positive");
  const std::uint64_t rounds = (s.signatures_required + s.machines - 1) / s.machines;
  const double effective = static_cast<double>(s.attack_time.count()) * static_cast<double>(rounds);
  return std::exp(-effective / static_cast<double>(s.block_interval.count()));
}

PartitionFunction overhead_partition(std::uint64_t overhead) {
  return [overhead](std::uint64_t machines, std::uint64_t total) -> std::uint64_t {
    if (machines <= 1 || total <= overhead) return total;
    return overhead + (total - overhead + machines - 1) / machines;
  };
}

double multi_machine_speedup(std::uint64_t machines, std::uint64_t total_point_additions,
                             const PartitionFunction& partition) {
  if (machines == 0) throw CostError("need at least one machine");
  if (total_point_additions == 0) throw CostError("need at least one point addition");
  const std::uint64_t per_machine = partition(machines, total_point_additions);
  if (per_machine == 0) throw CostError("partition assigned zero additions");
  return static_cast<double>(total_point_additions) / static_cast<double>(per_machine);
}

std::vector<SalvagePoint> salvage_in_order(const std::vector<WalletRecord>& wallets, Nanos per_key_time) {
  if (per_key_time <= Nanos::zero()) throw CostError("per-key time must be positive");
  std::vector<SalvagePoint> curve;
  curve.reserve(wallets.size());
  Nanos t{0};
  double total = 0;
  for (const WalletRecord& w : wallets) {
    if (w.balance < 0 || w.keys_required == 0) throw CostError("invalid wallet record '" + w.label + "'");
    t += per_key_time * static_cast<Nanos::rep>(w.keys_required);
    total += w.balance;
    curve.push_back({t, total, w.label});
  }
  return curve;
}

std::vector<SalvagePoint> salvage_timeline(std::vector<WalletRecord> wallets, Nanos per_key_time) {
  std::stable_sort(wallets.begin(), wallets.end(),
                   [](const WalletRecord& a, const WalletRecord& b) { return a.balance > b.balance; });
  return salvage_in_order(wallets, per_key_time);
}

double to_seconds(Nanos t) { return std::chrono::duration<double>(t).count(); }

Nanos from_seconds(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0 || seconds > 9.2e9) throw CostError("duration out of range");
  return Nanos(static_cast<Nanos::rep>(std::llround(seconds * 1e9)));
}

}  // namespace kickmix::cost

#include <ostream>

#include "kickmix/sim.hpp"

namespace kickmix::sim {

bool VectorBitSource::next() {
  if (pos_ >= bits_.size()) throw SimError("measurement randomness exhausted after " + std::to_string(pos_) + " bits");
  return bits_[pos_++];
}

bool ByteBitSource::next() {
  if (pos_ >= bytes_.size() * 8) {
    throw SimError("measurement randomness exhausted after " + std::to_string(pos_) + " bits");
  }
  bool bit = (bytes_[pos_ / 8] >> (pos_ % 8)) & 1U;
  ++pos_;
  return bit;
}

SimState::SimState(std::uint32_t qubits, std::uint32_t cbits)
    : bits_(qubits, false), cbits_(cbits, false), written_(cbits, false), cbit_to_measurement_(cbits, 0) {}

void SimState::apply(const ir::Gate& gate, BitSource& rng) {
  using ir::GateKind;
  const auto& q = gate.operands;

  if (gate.kind == GateKind::MX) {
    const bool r = rng.next();
    if (r && bits_[q[0]]) phase_ = -phase_;
    if (track_kick_) kick_.push_back(bits_[q[0]]);
    cbit_to_measurement_[gate.dest] = static_cast<std::uint32_t>(record_.size());
    record_.push_back(r);
    cbits_[gate.dest] = r;
    written_[gate.dest] = true;
    bits_[q[0]] = false;
    ++executed_total_;
    return;
  }

  bool product = true;  // AND of controls (permutation) or of all operands (diagonal)
  const unsigned n = ir::arity(gate.kind);
  const unsigned factors = ir::is_diagonal(gate.kind) ? n : n - 1;
  for (unsigned i = 0; i < factors; ++i) product = product && bits_[q[i]];

  if (gate.condition) {
    const ir::CBit cb = gate.condition->cbit;
    if (!written_[cb]) throw SimError("condition on unmeasured classical bit c" + std::to_string(cb));
    if (track_kick_ && ir::is_diagonal(gate.kind) && product) {
      auto m = cbit_to_measurement_[cb];
      kick_[m] = !kick_[m];
    }
    if (cbits_[cb] != gate.condition->value) return;
  }

  ++executed_total_;
  if (ir::is_non_clifford(gate.kind)) ++executed_non_clifford_;
  if (ir::is_diagonal(gate.kind)) {
    if (product) phase_ = -phase_;
  } else if (product) {
    bits_[gate.target()] = !bits_[gate.target()];
  }
}

void load_registers(const std::vector<ir::Register>& regs, const RegisterValues& values, std::vector<bool>& bits) {
  if (values.size() != regs.size()) {
    throw SimError("input shape mismatch: expected " + std::to_string(regs.size()) + " register(s), got " +
                   std::to_string(values.size()));
  }
  for (const ir::Register& reg : regs) {
    auto it = values.find(reg.name);
    if (it == values.end()) throw SimError("input shape mismatch: missing register '" + reg.name + "'");
    const BigInt& v = it->second;
    if (v < 0 || (v >> reg.width()) != 0) {
      throw SimError("input value for '" + reg.name + "' does not fit in " + std::to_string(reg.width()) + " bits");
    }
    for (unsigned i = 0; i < reg.width(); ++i) bits[reg.lo + i] = boost::multiprecision::bit_test(v, i);
  }
}

RegisterValues read_registers(const std::vector<ir::Register>& regs, const std::vector<bool>& bits) {
  RegisterValues out;
  for (const ir::Register& reg : regs) {
    BigInt v = 0;
    for (unsigned i = reg.width(); i-- > 0;) {
      v <<= 1;
      if (bits[reg.lo + i]) v |= 1;
    }
    out.emplace(reg.name, std::move(v));
  }
  return out;
}

RunResult run(const ir::Circuit& circuit, const RegisterValues& input, BitSource& rng, std::ostream* trace) {
  SimState state(circuit.qubit_count, circuit.cbit_count);
  load_registers(circuit.inputs, input, state.bits());
  std::uint64_t executed_before = 0;
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const ir::Gate& g = circuit.gates[i];
    state.apply(g, rng);
    if (trace != nullptr && state.executed_total() != executed_before) {
      *trace << i << ' ' << ir::opcode(g.kind);
      for (ir::Qubit q : g.qubits()) *trace << ' ' << q;
      if (g.kind == ir::GateKind::MX) *trace << " -> c" << g.dest << '=' << state.cbits()[g.dest];
      *trace << " phase " << (state.phase() > 0 ? '+' : '-') << '\n';
    }
    executed_before = state.executed_total();
  }
  RunResult result;
  result.outputs = read_registers(circuit.outputs, state.bits());
  result.phase = state.phase();
  result.measurements = state.measurements();
  result.bits = state.bits();
  result.executed_non_clifford = state.executed_non_clifford();
  result.executed_total = state.executed_total();
  return result;
}

std::vector<RunResult> run_all_measurement_branches(const ir::Circuit& circuit, const RegisterValues& input,
                                                    unsigned branch_limit) {
  std::size_t m = ir::static_resources(circuit).measurement_count;
  if (m > branch_limit) {
    throw SimError("circuit has " + std::to_string(m) + " measurements, above the branch limit of " +
                   std::to_string(branch_limit) + "; sample measurement outcomes or use branch analysis instead");
  }
  std::vector<RunResult> results;
  results.reserve(std::size_t{1} << m);
  for (std::uint64_t branch = 0; branch < (std::uint64_t{1} << m); ++branch) {
    std::vector<bool> outcomes(m);
    for (std::size_t i = 0; i < m; ++i) outcomes[i] = (branch >> i) & 1U;
    VectorBitSource rng(std::move(outcomes));
    results.push_back(run(circuit, input, rng));
  }
  return results;
}

}  // namespace kickmix::sim

#include <bit>
#include <cstdlib>

#include "kernels.hpp"
#include "kickmix/batch.hpp"

namespace kickmix::sim {

namespace detail {

std::vector<Op> compile(const ir::Circuit& circuit) {
  std::vector<std::uint32_t> measurement_of(circuit.cbit_count, 0);
  std::vector<bool> written(circuit.cbit_count, false);
  std::vector<Op> program;
  program.reserve(circuit.gates.size());
  std::uint32_t measurements = 0;
  for (const ir::Gate& g : circuit.gates) {
    Op op{g.kind, false, true, g.operands[0], g.operands[1], g.operands[2], 0, 0};
    // Unused operand slots point at a valid row; kernels never read them.
    const unsigned n = ir::arity(g.kind);
    if (n < 2) op.q1 = op.q0;
    if (n < 3) op.q2 = op.q0;
    if (g.kind == ir::GateKind::MX) {
      op.measurement = measurements;
      measurement_of[g.dest] = measurements++;
      written[g.dest] = true;
    } else if (g.condition) {
      if (!written[g.condition->cbit]) {
        throw SimError("condition on unmeasured classical bit c" + std::to_string(g.condition->cbit));
      }
      op.conditioned = true;
      op.cond_value = g.condition->value;
      op.cond_measurement = measurement_of[g.condition->cbit];
    }
    program.push_back(op);
  }
  return program;
}

}  // namespace detail

std::string_view kernel_name(Kernel kernel) {
  switch (kernel) {
    case Kernel::Auto: return "auto";
    case Kernel::Scalar: return "scalar";
    case Kernel::Portable: return "portable";
    case Kernel::Avx2: return "avx2";
  }
  return "?";
}

std::optional<Kernel> parse_kernel(std::string_view name) {
  for (Kernel k : {Kernel::Auto, Kernel::Scalar, Kernel::Portable, Kernel::Avx2}) {
    if (kernel_name(k) == name) return k;
  }
  return std::nullopt;
}

bool kernel_available(Kernel kernel) {
  switch (kernel) {
    case Kernel::Avx2: return kernels::cpu_has_avx2();
    default: return true;
  }
}

Kernel resolve_kernel(Kernel requested) {
  if (requested == Kernel::Auto) {
    if (const char* env = std::getenv("KICKMIX_KERNEL"); env != nullptr && *env != '\0') {
      auto k = parse_kernel(env);
      if (!k) throw SimError(std::string("KICKMIX_KERNEL: unknown kernel '") + env + "'");
      if (*k != Kernel::Auto) return resolve_kernel(*k);
    }
    return kernel_available(Kernel::Avx2) ? Kernel::Avx2 : Kernel::Portable;
  }
  if (!kernel_available(requested)) {
    throw SimError("kernel '" + std::string(kernel_name(requested)) + "' is not available on this CPU");
  }
  return requested;
}

bool branch_analyzable(const ir::Circuit& circuit) {
  for (const ir::Gate& g : circuit.gates) {
    if (g.condition && !ir::is_diagonal(g.kind)) return false;
  }
  return true;
}

Batch::Batch(const ir::Circuit& circuit, std::size_t lanes)
    : circuit_(&circuit), program_(detail::compile(circuit)), lanes_(lanes) {
  const std::size_t w64 = (lanes + 63) / 64;
  words_ = std::max<std::size_t>(4, (w64 + 3) / 4 * 4);
  measurements_ = 0;
  std::uint64_t conditioned = 0;
  for (const ir::Gate& g : circuit.gates) {
    if (g.kind == ir::GateKind::MX) ++measurements_;
    if (g.condition) {
      ++conditioned;
    } else {
      ++unconditioned_total_;
      if (ir::is_non_clifford(g.kind)) ++unconditioned_non_clifford_;
    }
  }
  planes_ = static_cast<unsigned>(std::bit_width(conditioned));
  input_.assign(std::size_t{circuit.qubit_count} * words_, 0);
  rng_.assign(measurements_ * words_, 0);
}

bool Batch::get(const std::vector<std::uint64_t>& rows, std::size_t row, std::size_t lane) const {
  return (rows[row * words_ + lane / 64] >> (lane % 64)) & 1U;
}

void Batch::put(std::vector<std::uint64_t>& rows, std::size_t words, std::size_t row, std::size_t lane, bool v) {
  std::uint64_t& word = rows[row * words + lane / 64];
  const std::uint64_t bit = std::uint64_t{1} << (lane % 64);
  word = v ? (word | bit) : (word & ~bit);
}

void Batch::set_input(std::size_t lane, const RegisterValues& values) {
  std::vector<bool> bits(circuit_->qubit_count, false);
  load_registers(circuit_->inputs, values, bits);
  for (ir::Qubit q = 0; q < circuit_->qubit_count; ++q) put(input_, words_, q, lane, bits[q]);
}

void Batch::set_qubit(std::size_t lane, ir::Qubit q, bool value) { put(input_, words_, q, lane, value); }

void Batch::set_measurements(std::size_t lane, std::span<const std::uint8_t> bytes) {
  if (bytes.size() * 8 < measurements_) {
    throw SimError("measurement randomness underrun: need " + std::to_string(measurements_) + " bits, got " +
                   std::to_string(bytes.size() * 8));
  }
  for (std::size_t m = 0; m < measurements_; ++m) put(rng_, words_, m, lane, (bytes[m / 8] >> (m % 8)) & 1U);
}

void Batch::set_measurement(std::size_t lane, std::size_t index, bool outcome) {
  put(rng_, words_, index, lane, outcome);
}

void Batch::run(Kernel kernel, BatchMode mode) {
  if (mode == BatchMode::BranchAnalysis && !branch_analyzable(*circuit_)) {
    throw SimError("branch analysis needs every conditioned gate to be diagonal");
  }
  last_kernel_ = resolve_kernel(kernel);
  last_mode_ = mode;
  bits_ = input_;
  phase_.assign(words_, 0);
  cond_nc_.assign(std::size_t{planes_} * words_, 0);
  cond_total_.assign(std::size_t{planes_} * words_, 0);
  varies_.assign(words_, 0);
  const bool analyse = mode == BatchMode::BranchAnalysis;
  kick_.assign(analyse ? measurements_ * words_ : 0, 0);

  if (last_kernel_ == Kernel::Scalar) {
    run_scalar(mode);
  } else {
    std::vector<std::uint64_t> zeros;
    if (analyse) zeros.assign(measurements_ * words_, 0);
    kernels::Buffers buf;
    buf.words = words_;
    buf.bits = bits_.data();
    buf.phase = phase_.data();
    buf.rng = analyse ? zeros.data() : rng_.data();
    buf.cond_nc = cond_nc_.data();
    buf.cond_total = cond_total_.data();
    buf.planes = planes_;
    buf.kick = analyse ? kick_.data() : nullptr;
#if defined(KICKMIX_HAVE_AVX2)
    if (last_kernel_ == Kernel::Avx2) {
      kernels::run_avx2(program_, buf);
    } else {
      kernels::run_portable(program_, buf);
    }
#else
    kernels::run_portable(program_, buf);
#endif
    if (analyse) {
      for (std::size_t m = 0; m < measurements_; ++m) {
        for (std::size_t w = 0; w < words_; ++w) varies_[w] |= kick_[m * words_ + w];
      }
    }
  }
  kick_.clear();
  kick_.shrink_to_fit();
  ran_ = true;
}

void Batch::run_scalar(BatchMode mode) {
  const bool analyse = mode == BatchMode::BranchAnalysis;
  for (std::size_t lane = 0; lane < lanes_; ++lane) {
    SimState state(circuit_->qubit_count, circuit_->cbit_count);
    state.track_kickback(analyse);
    for (ir::Qubit q = 0; q < circuit_->qubit_count; ++q) state.bits()[q] = get(input_, q, lane);
    std::vector<bool> outcomes(measurements_, false);
    if (!analyse) {
      for (std::size_t m = 0; m < measurements_; ++m) outcomes[m] = get(rng_, m, lane);
    }
    VectorBitSource rng(std::move(outcomes));
    for (const ir::Gate& g : circuit_->gates) state.apply(g, rng);

    for (ir::Qubit q = 0; q < circuit_->qubit_count; ++q) put(bits_, words_, q, lane, state.bits()[q]);
    put(phase_, words_, 0, lane, state.phase() < 0);
    const std::uint64_t nc = state.executed_non_clifford() - unconditioned_non_clifford_;
    const std::uint64_t total = state.executed_total() - unconditioned_total_;
    for (unsigned p = 0; p < planes_; ++p) {
      put(cond_nc_, words_, p, lane, (nc >> p) & 1U);
      put(cond_total_, words_, p, lane, (total >> p) & 1U);
    }
    bool varies = false;
    for (bool k : state.kickback()) varies = varies || k;
    put(varies_, words_, 0, lane, varies);
  }
}

bool Batch::qubit(std::size_t lane, ir::Qubit q) const { return get(bits_, q, lane); }

int Batch::phase(std::size_t lane) const { return get(phase_, 0, lane) ? -1 : 1; }

bool Batch::measurement(std::size_t lane, std::size_t index) const {
  if (ran_ && last_mode_ == BatchMode::BranchAnalysis) return false;
  return get(rng_, index, lane);
}

std::uint64_t Batch::counter(const std::vector<std::uint64_t>& planes, std::size_t lane) const {
  std::uint64_t v = 0;
  for (unsigned p = 0; p < planes_; ++p) v |= std::uint64_t{get(planes, p, lane)} << p;
  return v;
}

std::uint64_t Batch::executed_non_clifford(std::size_t lane) const {
  return unconditioned_non_clifford_ + counter(cond_nc_, lane);
}

std::uint64_t Batch::executed_total(std::size_t lane) const {
  return unconditioned_total_ + counter(cond_total_, lane);
}

BigInt Batch::read(std::size_t lane, const ir::Register& reg) const {
  BigInt v = 0;
  for (unsigned i = reg.width(); i-- > 0;) {
    v <<= 1;
    if (qubit(lane, reg.lo + i)) v |= 1;
  }
  return v;
}

RegisterValues Batch::outputs(std::size_t lane) const {
  RegisterValues out;
  for (const ir::Register& reg : circuit_->outputs) out.emplace(reg.name, read(lane, reg));
  return out;
}

bool Batch::phase_varies(std::size_t lane) const { return get(varies_, 0, lane); }

}  // namespace kickmix::sim

#include "kernels.hpp"

namespace kickmix::sim::kernels {

namespace {

using detail::Op;
using ir::GateKind;

inline void count(std::uint64_t* planes, unsigned n, std::size_t words, std::size_t w, std::uint64_t mask) {
  std::uint64_t carry = mask;
  for (unsigned p = 0; p < n && carry != 0; ++p) {
    std::uint64_t& c = planes[p * words + w];
    const std::uint64_t t = c & carry;
    c ^= carry;
    carry = t;
  }
}

template <bool Conditioned, bool Kick>
void apply(const Op& op, const Buffers& b) {
  const std::size_t W = b.words;
  std::uint64_t* q0 = b.bits + op.q0 * W;
  std::uint64_t* q1 = b.bits + op.q1 * W;
  std::uint64_t* q2 = b.bits + op.q2 * W;
  std::uint64_t* ph = b.phase;
  const std::uint64_t* cond = Conditioned ? b.rng + op.cond_measurement * W : nullptr;
  std::uint64_t* kick = (Kick && Conditioned) ? b.kick + op.cond_measurement * W : nullptr;
  const std::uint64_t flip = (Conditioned && !op.cond_value) ? ~std::uint64_t{0} : 0;
  const bool nc = ir::is_non_clifford(op.kind);

  for (std::size_t w = 0; w < W; ++w) {
    const std::uint64_t m = Conditioned ? (cond[w] ^ flip) : ~std::uint64_t{0};
    std::uint64_t product = 0;
    switch (op.kind) {
      case GateKind::X: q0[w] ^= m; break;
      case GateKind::CX: q1[w] ^= q0[w] & m; break;
      case GateKind::CCX: q2[w] ^= q0[w] & q1[w] & m; break;
      case GateKind::Z: product = q0[w]; break;
      case GateKind::CZ: product = q0[w] & q1[w]; break;
      case GateKind::CCZ: product = q0[w] & q1[w] & q2[w]; break;
      case GateKind::MX: break;
    }
    if (ir::is_diagonal(op.kind)) {
      ph[w] ^= product & m;
      if constexpr (Kick && Conditioned) kick[w] ^= product;
    }
    if constexpr (Conditioned) {
      count(b.cond_total, b.planes, W, w, m);
      if (nc) count(b.cond_nc, b.planes, W, w, m);
    }
  }
}

template <bool Kick>
void measure(const Op& op, const Buffers& b) {
  const std::size_t W = b.words;
  std::uint64_t* q = b.bits + op.q0 * W;
  const std::uint64_t* r = b.rng + op.measurement * W;
  std::uint64_t* kick = Kick ? b.kick + op.measurement * W : nullptr;
  for (std::size_t w = 0; w < W; ++w) {
    b.phase[w] ^= r[w] & q[w];
    if constexpr (Kick) kick[w] = q[w];
    q[w] = 0;
  }
}

template <bool Kick>
void run_program(std::span<const Op> program, const Buffers& b) {
  for (const Op& op : program) {
    if (op.kind == GateKind::MX) {
      measure<Kick>(op, b);
    } else if (op.conditioned) {
      apply<true, Kick>(op, b);
    } else {
      apply<false, Kick>(op, b);
    }
  }
}

}  // namespace

void run_portable(std::span<const Op> program, const Buffers& buf) {
  if (buf.kick != nullptr) {
    run_program<true>(program, buf);
  } else {
    run_program<false>(program, buf);
  }
}

bool cpu_has_avx2() {
#if defined(KICKMIX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace kickmix::sim::kernels

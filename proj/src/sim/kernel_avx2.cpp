// Compiled with -mavx2; only entered after cpu_has_avx2().

#include <immintrin.h>

#include "kernels.hpp"

namespace kickmix::sim::kernels {

namespace {

using detail::Op;
using ir::GateKind;

inline __m256i load(const std::uint64_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(std::uint64_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }
inline void xor_into(std::uint64_t* p, __m256i v) { store(p, _mm256_xor_si256(load(p), v)); }

inline void count(std::uint64_t* planes, unsigned n, std::size_t words, std::size_t w, __m256i carry) {
  for (unsigned p = 0; p < n && !_mm256_testz_si256(carry, carry); ++p) {
    std::uint64_t* c = planes + p * words + w;
    const __m256i cur = load(c);
    store(c, _mm256_xor_si256(cur, carry));
    carry = _mm256_and_si256(cur, carry);
  }
}

template <bool Conditioned, bool Kick>
void apply(const Op& op, const Buffers& b) {
  const std::size_t W = b.words;
  std::uint64_t* q0 = b.bits + op.q0 * W;
  std::uint64_t* q1 = b.bits + op.q1 * W;
  std::uint64_t* q2 = b.bits + op.q2 * W;
  const std::uint64_t* cond = Conditioned ? b.rng + op.cond_measurement * W : nullptr;
  std::uint64_t* kick = (Kick && Conditioned) ? b.kick + op.cond_measurement * W : nullptr;
  const __m256i ones = _mm256_set1_epi64x(-1);
  const __m256i flip = (Conditioned && !op.cond_value) ? ones : _mm256_setzero_si256();
  const bool nc = ir::is_non_clifford(op.kind);
  const bool diagonal = ir::is_diagonal(op.kind);

  for (std::size_t w = 0; w < W; w += 4) {
    const __m256i m = Conditioned ? _mm256_xor_si256(load(cond + w), flip) : ones;
    __m256i product = _mm256_setzero_si256();
    switch (op.kind) {
      case GateKind::X: xor_into(q0 + w, m); break;
      case GateKind::CX: xor_into(q1 + w, _mm256_and_si256(load(q0 + w), m)); break;
      case GateKind::CCX:
        xor_into(q2 + w, _mm256_and_si256(_mm256_and_si256(load(q0 + w), load(q1 + w)), m));
        break;
      case GateKind::Z: product = load(q0 + w); break;
      case GateKind::CZ: product = _mm256_and_si256(load(q0 + w), load(q1 + w)); break;
      case GateKind::CCZ:
        product = _mm256_and_si256(_mm256_and_si256(load(q0 + w), load(q1 + w)), load(q2 + w));
        break;
      case GateKind::MX: break;
    }
    if (diagonal) {
      xor_into(b.phase + w, _mm256_and_si256(product, m));
      if constexpr (Kick && Conditioned) xor_into(kick + w, product);
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
  const __m256i zero = _mm256_setzero_si256();
  for (std::size_t w = 0; w < W; w += 4) {
    const __m256i qv = load(q + w);
    xor_into(b.phase + w, _mm256_and_si256(load(r + w), qv));
    if constexpr (Kick) store(kick + w, qv);
    store(q + w, zero);
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

void run_avx2(std::span<const Op> program, const Buffers& buf) {
  if (buf.kick != nullptr) {
    run_program<true>(program, buf);
  } else {
    run_program<false>(program, buf);
  }
}

}  // namespace kickmix::sim::kernels

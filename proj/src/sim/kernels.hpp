#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "kickmix/batch.hpp"

namespace kickmix::sim::kernels {

// Row-major lane buffers: row r of a matrix occupies words [r*words, (r+1)*words).
// `words` is a multiple of 4 so 256-bit kernels need no tail handling.
struct Buffers {
  std::size_t words = 0;
  std::uint64_t* bits = nullptr;        // qubits x words
  std::uint64_t* phase = nullptr;       // 1 x words, bit set = phase -1
  const std::uint64_t* rng = nullptr;   // measurements x words
  std::uint64_t* cond_nc = nullptr;     // planes x words, vertical counter
  std::uint64_t* cond_total = nullptr;  // planes x words, vertical counter
  unsigned planes = 0;
  std::uint64_t* kick = nullptr;        // measurements x words, null unless analysing
};

void run_portable(std::span<const detail::Op> program, const Buffers& buf);

#if defined(KICKMIX_HAVE_AVX2)
void run_avx2(std::span<const detail::Op> program, const Buffers& buf);
#endif

bool cpu_has_avx2();

}  // namespace kickmix::sim::kernels

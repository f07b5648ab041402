#pragma once

#include <vector>

#include "kickmix/batch.hpp"
#include "kickmix/sim.hpp"

namespace kmtest {

using kickmix::BigInt;
using kickmix::sim::RegisterValues;

struct Outcome {
  RegisterValues outputs;
  bool phase_plus_everywhere = true;
  bool outputs_agree = true;  // same outputs on every measurement branch
};

// Explicit enumeration of every measurement branch.
inline Outcome brute_branches(const kickmix::ir::Circuit& c, const RegisterValues& in) {
  Outcome o;
  auto runs = kickmix::sim::run_all_measurement_branches(c, in, 14);
  o.outputs = runs.front().outputs;
  for (const auto& r : runs) {
    o.phase_plus_everywhere = o.phase_plus_everywhere && r.phase == 1;
    o.outputs_agree = o.outputs_agree && r.outputs == o.outputs;
  }
  return o;
}

// Every-branch outcome for many inputs at once through branch analysis.
inline std::vector<Outcome> analyse(const kickmix::ir::Circuit& c, const std::vector<RegisterValues>& inputs,
                                    kickmix::sim::Kernel kernel = kickmix::sim::Kernel::Auto) {
  kickmix::sim::Batch batch(c, inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) batch.set_input(i, inputs[i]);
  batch.run(kernel, kickmix::sim::BatchMode::BranchAnalysis);
  std::vector<Outcome> out(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out[i].outputs = batch.outputs(i);
    out[i].phase_plus_everywhere = batch.phase(i) == 1 && !batch.phase_varies(i);
  }
  return out;
}

inline RegisterValues regs(std::initializer_list<std::pair<const char*, std::uint64_t>> values) {
  RegisterValues r;
  for (const auto& [k, v] : values) r.emplace(k, BigInt{v});
  return r;
}

}  // namespace kmtest

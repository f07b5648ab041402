#include <doctest.h>

#include <random>
#include <sstream>

#include "kickmix/build.hpp"
#include "kickmix/sim.hpp"
#include "support.hpp"

using namespace kickmix;
using kmtest::regs;

namespace {

sim::RunResult run_bits(const ir::Circuit& c, const sim::RegisterValues& in, std::vector<bool> rng) {
  sim::VectorBitSource src(std::move(rng));
  return sim::run(c, in, src);
}

const char* kGadget = "qubits 3\ncbits 1\nin a 0..0\nin b 1..1\nout a 0..0\nout b 1..1\nout t 2..2\n"
                      "CCX 0 1 2\nMX 2 -> c0\nIF c0 CZ 0 1\n";

}  // namespace

TEST_CASE("single gates") {
  auto x = ir::parse("qubits 1\nin q 0..0\nout q 0..0\nX 0\n");
  auto r = run_bits(x, regs({{"q", 0}}), {});
  CHECK(r.outputs.at("q") == 1);
  CHECK(r.phase == 1);

  auto z = ir::parse("qubits 3\nin q 0..2\nout q 0..2\nZ 0\nCZ 0 1\nCCZ 0 1 2\n");
  CHECK(run_bits(z, regs({{"q", 1}}), {}).phase == -1);
  CHECK(run_bits(z, regs({{"q", 3}}), {}).phase == 1);
  CHECK(run_bits(z, regs({{"q", 7}}), {}).phase == -1);
  CHECK(run_bits(z, regs({{"q", 6}}), {}).phase == 1);

  auto ccx = ir::parse("qubits 3\nin q 0..2\nout q 0..2\nCCX 0 1 2\nCX 2 0\n");
  CHECK(run_bits(ccx, regs({{"q", 3}}), {}).outputs.at("q") == 6);
  CHECK(run_bits(ccx, regs({{"q", 1}}), {}).outputs.at("q") == 1);
}

TEST_CASE("X-basis measurement") {
  auto mx = ir::parse("qubits 1\ncbits 1\nin q 0..0\nout q 0..0\nMX 0 -> c0\n");
  auto minus = run_bits(mx, regs({{"q", 1}}), {true});
  CHECK(minus.phase == -1);
  CHECK(minus.outputs.at("q") == 0);
  CHECK(minus.measurements == std::vector<bool>{true});
  auto plus = run_bits(mx, regs({{"q", 1}}), {false});
  CHECK(plus.phase == 1);
  CHECK(plus.outputs.at("q") == 0);
  CHECK(run_bits(mx, regs({{"q", 0}}), {true}).phase == 1);

  CHECK_THROWS_AS(run_bits(mx, regs({{"q", 1}}), {}), sim::SimError);
}

TEST_CASE("temporary AND gadget") {
  auto c = ir::parse(kGadget);
  for (bool r : {false, true}) {
    auto res = run_bits(c, regs({{"a", 1}, {"b", 1}}), {r});
    CHECK(res.phase == 1);
    CHECK(res.outputs.at("t") == 0);
    CHECK(res.executed_non_clifford == 1);
    CHECK(res.executed_total == (r ? 3U : 2U));
  }
  auto branches = sim::run_all_measurement_branches(c, regs({{"a", 1}, {"b", 1}}));
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].phase == 1);
  CHECK(branches[1].phase == 1);
  CHECK(branches[0].bits == branches[1].bits);

  // Drop the correction: the r = 1 branch keeps the kickback.
  ir::Circuit broken = c;
  broken.gates.pop_back();
  auto bb = sim::run_all_measurement_branches(broken, regs({{"a", 1}, {"b", 1}}));
  CHECK(bb[0].phase == 1);
  CHECK(bb[1].phase == -1);
  auto ok = sim::run_all_measurement_branches(broken, regs({{"a", 0}, {"b", 1}}));
  CHECK(ok[1].phase == 1);
}

TEST_CASE("branch enumeration") {
  auto none = ir::parse("qubits 2\nin q 0..1\nout q 0..1\nCX 0 1\n");
  CHECK(sim::run_all_measurement_branches(none, regs({{"q", 1}})).size() == 1);

  auto adder = build::build_adder(4).circuit;
  auto all = sim::run_all_measurement_branches(adder, regs({{"a", 5}, {"b", 9}}));
  CHECK(all.size() == 8);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t m = 0; m < 3; ++m) CHECK(all[i].measurements[m] == static_cast<bool>((i >> m) & 1U));
  }

  auto big = build::build_adder(16).circuit;  // 15 measurements
  CHECK_THROWS_WITH_AS(sim::run_all_measurement_branches(big, regs({{"a", 0}, {"b", 0}}), 10),
                       doctest::Contains("branch analysis"), sim::SimError);
}

TEST_CASE("input shape") {
  auto c = ir::parse(kGadget);
  CHECK_THROWS_AS(run_bits(c, regs({{"a", 1}}), {false}), sim::SimError);
  CHECK_THROWS_AS(run_bits(c, regs({{"a", 1}, {"c", 1}}), {false}), sim::SimError);
  CHECK_THROWS_AS(run_bits(c, regs({{"a", 2}, {"b", 1}}), {false}), sim::SimError);
}

TEST_CASE("counters, determinism and reversibility") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    ir::Circuit c;
    c.qubit_count = 4;
    c.inputs.push_back({"q", 0, 3});
    c.outputs.push_back({"q", 0, 3});
    const bool with_mx = trial % 2 == 1;
    bool conditioned = false;
    for (int g = 0; g < 25; ++g) {
      std::array<ir::Qubit, 4> pool{0, 1, 2, 3};
      std::shuffle(pool.begin(), pool.end(), rng);
      const unsigned pick = rng() % (with_mx ? 7 : 6);
      ir::Gate gate;
      gate.kind = static_cast<ir::GateKind>(pick);
      for (unsigned k = 0; k < ir::arity(gate.kind); ++k) gate.operands[k] = pool[k];
      if (gate.kind == ir::GateKind::MX) {
        gate.dest = c.cbit_count++;
      } else if (c.cbit_count > 0 && rng() % 2) {
        gate = gate.when(rng() % c.cbit_count, rng() % 2);
        conditioned = true;
      }
      c.gates.push_back(gate);
    }
    const auto stat = ir::static_resources(c);
    std::vector<bool> bits(stat.measurement_count);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng() % 2;
    const auto in = regs({{"q", rng() % 16}});
    sim::VectorBitSource src(bits);
    auto r1 = sim::run(c, in, src);
    CHECK(src.consumed() == stat.measurement_count);
    auto r2 = run_bits(c, in, bits);
    CHECK(r1 == r2);
    CHECK(r1.executed_non_clifford <= stat.non_clifford_gate_count);
    CHECK(r1.executed_total <= stat.total_gate_count);
    if (!conditioned) CHECK(r1.executed_total == stat.total_gate_count);

    if (!with_mx) {
      auto back = run_bits(ir::inverse(c), r1.outputs, {});
      CHECK(back.outputs == in);
      // Diagonal gates only contribute phase, and the same ones fire on the way back.
      CHECK(back.phase == r1.phase);
    }
  }
}

TEST_CASE("trace") {
  auto c = ir::parse(kGadget);
  std::ostringstream os;
  sim::VectorBitSource src({false});
  sim::run(c, regs({{"a", 1}, {"b", 1}}), src, &os);
  CHECK(os.str() == "0 CCX 0 1 2 phase +\n1 MX 2 -> c0=0 phase +\n");
}

TEST_CASE("byte bit source is LSB first") {
  const std::uint8_t bytes[] = {0b00000101, 0x80};
  sim::ByteBitSource src(bytes);
  std::vector<bool> got;
  for (int i = 0; i < 16; ++i) got.push_back(src.next());
  CHECK(got[0]);
  CHECK_FALSE(got[1]);
  CHECK(got[2]);
  CHECK(got[15]);
  CHECK_THROWS_AS(src.next(), sim::SimError);
}

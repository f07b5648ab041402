#include <doctest.h>

#include <random>

#include "kickmix/build.hpp"
#include "support.hpp"

using namespace kickmix;
using kmtest::regs;

namespace {

void check_prediction(const build::BuildReport& r) {
  CHECK(r.predicted == ir::static_resources(r.circuit));
  CHECK_NOTHROW(ir::validate(r.circuit));
}

std::uint64_t value(const sim::RegisterValues& v, const char* name) { return v.at(name).convert_to<std::uint64_t>(); }

}  // namespace

TEST_CASE("temp-AND gadget") {
  auto r = build::build_temp_and();
  check_prediction(r);
  CHECK(r.circuit.qubit_count == 3);
  CHECK(r.circuit.cbit_count == 1);
  CHECK(r.predicted.non_clifford_gate_count == 1);
  // Only the compute side is non-Clifford.
  CHECK(r.circuit.gates[0].kind == ir::GateKind::CCX);
  for (std::size_t i = 1; i < r.circuit.gates.size(); ++i) CHECK_FALSE(ir::is_non_clifford(r.circuit.gates[i].kind));

  for (std::uint64_t a = 0; a < 2; ++a) {
    for (std::uint64_t b = 0; b < 2; ++b) {
      sim::SimState s(3, 1);
      s.bits()[0] = a;
      s.bits()[1] = b;
      sim::VectorBitSource none({});
      s.apply(r.circuit.gates[0], none);
      CHECK(s.bits()[2] == (a && b));

      auto o = kmtest::brute_branches(r.circuit, regs({{"a", a}, {"b", b}}));
      CHECK(o.phase_plus_everywhere);
      CHECK(o.outputs_agree);
      CHECK(value(o.outputs, "a") == a);
      CHECK(value(o.outputs, "b") == b);
    }
  }
}

TEST_CASE("adder") {
  for (unsigned m = 1; m <= 8; ++m) check_prediction(build::build_adder(m));

  auto r3 = build::build_adder(3);
  auto o = kmtest::brute_branches(r3.circuit, regs({{"a", 3}, {"b", 4}}));
  CHECK(value(o.outputs, "b") == 7);
  CHECK(value(o.outputs, "a") == 3);
  CHECK(o.phase_plus_everywhere);
  CHECK(o.outputs_agree);

  auto r1 = build::build_adder(1);
  CHECK(r1.predicted.measurement_count == 0);
  CHECK(r1.circuit.gates.size() == 1);
  CHECK(r1.circuit.gates[0].kind == ir::GateKind::CX);

  SUBCASE("4-bit exhaustive") {
    auto r = build::build_adder(4);
    std::vector<sim::RegisterValues> inputs;
    for (std::uint64_t a = 0; a < 16; ++a) {
      for (std::uint64_t b = 0; b < 16; ++b) inputs.push_back(regs({{"a", a}, {"b", b}}));
    }
    auto outs = kmtest::analyse(r.circuit, inputs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto a = value(inputs[i], "a"), b = value(inputs[i], "b");
      CHECK(value(outs[i].outputs, "b") == (a + b) % 16);
      CHECK(value(outs[i].outputs, "a") == a);
      CHECK(outs[i].phase_plus_everywhere);
    }
    // The same through explicit branch enumeration for a spread of inputs.
    for (std::size_t i = 0; i < inputs.size(); i += 17) {
      auto bo = kmtest::brute_branches(r.circuit, inputs[i]);
      CHECK(bo.outputs == outs[i].outputs);
      CHECK(bo.phase_plus_everywhere);
    }
  }

  SUBCASE("wide random") {
    std::mt19937_64 rng(7);
    for (unsigned m : {9U, 12U, 16U}) {
      auto r = build::build_adder(m);
      check_prediction(r);
      std::vector<sim::RegisterValues> inputs;
      for (int i = 0; i < 200; ++i) inputs.push_back(regs({{"a", rng() % (1U << m)}, {"b", rng() % (1U << m)}}));
      auto outs = kmtest::analyse(r.circuit, inputs);
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        CHECK(value(outs[i].outputs, "b") == (value(inputs[i], "a") + value(inputs[i], "b")) % (1U << m));
        CHECK(outs[i].phase_plus_everywhere);
      }
    }
  }

  CHECK_THROWS_AS(build::build_adder(0), build::BuildError);
  CHECK_THROWS_AS(build::build_adder(17), build::BuildError);
  CHECK_THROWS_AS(build::build_adder(99), build::BuildError);
}

TEST_CASE("modular constant addition") {
  auto r = build::build_mod_add_const(4, 5, 11);
  check_prediction(r);
  CHECK(r.circuit.meta("exceptional") == "undefined");
  auto o = kmtest::analyse(r.circuit, {regs({{"x", 9}})});
  CHECK(value(o[0].outputs, "x") == 3);
  CHECK(o[0].phase_plus_everywhere);

  struct Params {
    unsigned m;
    std::uint64_t c, p;
  };
  for (Params pr : std::vector<Params>{{4, 5, 11}, {4, 0, 11}, {4, 10, 11}, {2, 1, 3}, {2, 0, 2}, {2, 1, 2},
                                        {6, 17, 61}, {6, 60, 61}, {5, 9, 31}, {8, 200, 251}}) {
    CAPTURE(pr.m);
    CAPTURE(pr.c);
    CAPTURE(pr.p);
    auto rc = build::build_mod_add_const(pr.m, pr.c, pr.p);
    check_prediction(rc);
    std::vector<sim::RegisterValues> inputs;
    for (std::uint64_t x = 0; x < pr.p; ++x) inputs.push_back(regs({{"x", x}}));
    auto outs = kmtest::analyse(rc.circuit, inputs);
    for (std::uint64_t x = 0; x < pr.p; ++x) {
      CHECK(value(outs[x].outputs, "x") == (x + pr.c) % pr.p);
      CHECK(outs[x].phase_plus_everywhere);
    }
  }

  // c = 0 is the identity on [0, p).
  auto id = build::build_mod_add_const(4, 0, 11);
  for (std::uint64_t x = 0; x < 11; ++x) {
    CHECK(value(kmtest::analyse(id.circuit, {regs({{"x", x}})})[0].outputs, "x") == x);
  }

  CHECK_THROWS_AS(build::build_mod_add_const(4, 5, 17), build::BuildError);
  CHECK_THROWS_AS(build::build_mod_add_const(4, 11, 11), build::BuildError);
  CHECK_THROWS_AS(build::build_mod_add_const(0, 0, 1), build::BuildError);
}

TEST_CASE("table lookup") {
  auto id = build::build_lookup({0, 1, 2, 3}, 2, 2);
  check_prediction(id);
  auto o = kmtest::analyse(id.circuit, {regs({{"addr", 2}, {"target", 0}})});
  CHECK(value(o[0].outputs, "target") == 2);

  auto w1 = build::build_lookup({1, 0}, 1, 1);
  check_prediction(w1);
  CHECK(w1.predicted.non_clifford_gate_count == 0);

  std::mt19937_64 rng(11);
  for (unsigned w = 0; w <= 6; ++w) {
    for (unsigned d : {1U, 3U, 8U}) {
      std::vector<std::uint64_t> table(std::size_t{1} << w);
      for (auto& e : table) e = rng() % (1U << d);
      auto r = build::build_lookup(table, w, d);
      CAPTURE(w);
      CAPTURE(d);
      check_prediction(r);
      const std::uint64_t expected_nc = w == 0 ? 0 : (1U << w) - 2;
      CHECK(r.predicted.non_clifford_gate_count == expected_nc);
      CHECK(r.terms.at("lookup_non_clifford") == expected_nc);
      std::vector<sim::RegisterValues> inputs;
      std::vector<std::uint64_t> junk;
      for (std::uint64_t k = 0; k < table.size(); ++k) {
        for (int rep = 0; rep < 3; ++rep) {
          junk.push_back(rep == 0 ? 0 : rng() % (1U << d));
          sim::RegisterValues in = regs({{"target", junk.back()}});
          if (w > 0) in.emplace("addr", BigInt{k});
          inputs.push_back(in);
        }
      }
      auto outs = kmtest::analyse(r.circuit, inputs);
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::uint64_t k = i / 3;
        CHECK(value(outs[i].outputs, "target") == (table[k] ^ junk[i]));
        if (w > 0) CHECK(value(outs[i].outputs, "addr") == k);
        CHECK(outs[i].phase_plus_everywhere);
      }
    }
  }

  CHECK_THROWS_AS(build::build_lookup({0, 1, 2}, 2, 2), build::BuildError);
  CHECK_THROWS_AS(build::build_lookup({0, 4}, 1, 2), build::BuildError);
  CHECK_THROWS_AS(build::build_lookup(std::vector<std::uint64_t>(512), 9, 2), build::BuildError);
}

namespace {

std::uint64_t encode(const ec::CurvePoint& p, unsigned nb) {
  if (p.is_infinity()) return (std::uint64_t{1} << (2 * nb)) - 1;
  return p.x().convert_to<std::uint64_t>() | (p.y().convert_to<std::uint64_t>() << nb);
}

sim::RegisterValues point_regs(const ec::CurvePoint& q, unsigned nb) {
  const std::uint64_t e = encode(q, nb);
  const std::uint64_t mask = (std::uint64_t{1} << nb) - 1;
  return regs({{"qx", e & mask}, {"qy", e >> nb}});
}

std::uint64_t read_state(const sim::RegisterValues& out, unsigned nb) {
  return value(out, "qx") | (value(out, "qy") << nb);
}

}  // namespace

TEST_CASE("permutation point addition") {
  for (const char* name : {"toy-p11-b7", "toy-p61-b7"}) {
    CAPTURE(name);
    const auto& curve = ec::named_curve(name);
    const unsigned nb = curve.coordinate_bits();
    const auto points = ec::enumerate_points(curve);

    auto zero = build::build_pointadd_permutation(curve, ec::CurvePoint::infinity());
    check_prediction(zero);
    CHECK(zero.circuit.gates.empty());

    for (const auto& p : {curve.generator, ec::scalar_mul(3, curve.generator, curve)}) {
      auto r = build::build_pointadd_permutation(curve, p);
      check_prediction(r);
      CHECK(r.terms.at("point_add_non_clifford") == r.predicted.non_clifford_gate_count);
      CHECK(r.circuit.meta("infinity") == "all-ones");
      std::vector<sim::RegisterValues> inputs;
      for (const auto& q : points) inputs.push_back(point_regs(q, nb));
      auto outs = kmtest::analyse(r.circuit, inputs);
      for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(read_state(outs[i].outputs, nb) == encode(ec::point_add(points[i], p, curve), nb));
        CHECK(outs[i].phase_plus_everywhere);
      }
    }
  }

  SUBCASE("order of P applications return to Q") {
    const auto& curve = ec::named_curve("toy-p11-b7");
    const unsigned nb = curve.coordinate_bits();
    const auto p = ec::scalar_mul(2, curve.generator, curve);
    const auto order = ec::brute_force_order(p, curve).convert_to<unsigned>();
    auto r = build::build_pointadd_permutation(curve, p);
    for (const auto& q : ec::enumerate_points(curve)) {
      sim::RegisterValues state = point_regs(q, nb);
      for (unsigned i = 0; i < order; ++i) {
        state = kmtest::analyse(r.circuit, {state})[0].outputs;
        if (i + 1 < order) CHECK(read_state(state, nb) != encode(q, nb));
      }
      CHECK(read_state(state, nb) == encode(q, nb));
    }
  }

  SUBCASE("whole register space is permuted") {
    const auto& curve = ec::named_curve("toy-p11-b7");
    const unsigned nb = curve.coordinate_bits();
    auto r = build::build_pointadd_permutation(curve, curve.generator);
    std::vector<sim::RegisterValues> inputs;
    for (std::uint64_t s = 0; s < (1U << (2 * nb)); ++s) {
      inputs.push_back(regs({{"qx", s & ((1U << nb) - 1)}, {"qy", s >> nb}}));
    }
    auto outs = kmtest::analyse(r.circuit, inputs);
    std::vector<bool> hit(inputs.size(), false);
    for (const auto& o : outs) {
      const auto s = read_state(o.outputs, nb);
      CHECK_FALSE(hit[s]);
      hit[s] = true;
    }
  }

  CHECK_THROWS_AS(build::build_pointadd_permutation(ec::named_curve("secp256k1"),
                                                    ec::named_curve("secp256k1").generator),
                  build::BuildError);
  CHECK_THROWS_AS(build::build_pointadd_permutation(ec::named_curve("toy-p11-b7"), ec::CurvePoint(1, 1)),
                  build::BuildError);
}

TEST_CASE("windowed point addition") {
  const auto& curve = ec::named_curve("toy-p11-b7");
  const unsigned nb = curve.coordinate_bits();
  const auto points = ec::enumerate_points(curve);
  for (unsigned w = 1; w <= 3; ++w) {
    CAPTURE(w);
    auto r = build::build_windowed_pointadd(curve, curve.generator, w);
    check_prediction(r);
    CHECK(r.terms.at("lookup_non_clifford") == (1U << w) - 2);
    CHECK(r.terms.at("lookup_non_clifford") + r.terms.at("point_add_non_clifford") ==
          r.predicted.non_clifford_gate_count);
    std::vector<sim::RegisterValues> inputs;
    std::vector<std::pair<std::uint64_t, ec::CurvePoint>> cases;
    for (std::uint64_t k = 0; k < (1U << w); ++k) {
      for (const auto& q : points) {
        auto in = point_regs(q, nb);
        in.emplace("k", BigInt{k});
        inputs.push_back(in);
        cases.emplace_back(k, q);
      }
    }
    auto outs = kmtest::analyse(r.circuit, inputs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& [k, q] = cases[i];
      const auto want = ec::point_add(q, ec::scalar_mul(k, curve.generator, curve), curve);
      CHECK(read_state(outs[i].outputs, nb) == encode(want, nb));
      CHECK(value(outs[i].outputs, "k") == k);
      CHECK(outs[i].phase_plus_everywhere);
      if (k == 0) CHECK(read_state(outs[i].outputs, nb) == encode(q, nb));
    }
  }

  auto p61 = build::build_windowed_pointadd(ec::named_curve("toy-p61-b7"), ec::named_curve("toy-p61-b7").generator, 2);
  check_prediction(p61);

  CHECK_THROWS_AS(build::build_windowed_pointadd(curve, curve.generator, 0), build::BuildError);
  CHECK_THROWS_AS(build::build_windowed_pointadd(curve, curve.generator, 5), build::BuildError);
}

TEST_CASE("mutation") {
  auto adder = build::build_adder(4);
  CHECK(build::mutate(adder.circuit, 5) == build::mutate(adder.circuit, 5));
  bool some_differ = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto m = build::mutate_detailed(adder.circuit, seed);
    CHECK_NOTHROW(ir::validate(m.circuit));
    CHECK_FALSE(m.description.empty());
    some_differ = some_differ || !(m.circuit == adder.circuit);
  }
  CHECK(some_differ);

  SUBCASE("dropped correction in temp-AND flips the phase") {
    auto t = build::build_temp_and();
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
      auto m = build::mutate_detailed(t.circuit, seed);
      if (m.kind != build::MutationKind::DropGate || t.circuit.gates[m.gate_index].kind != ir::GateKind::CZ) continue;
      found = true;
      auto o = kmtest::brute_branches(m.circuit, regs({{"a", 1}, {"b", 1}}));
      CHECK_FALSE(o.phase_plus_everywhere);
      CHECK(kmtest::brute_branches(m.circuit, regs({{"a", 0}, {"b", 1}})).phase_plus_everywhere);
    }
    CHECK(found);
  }

  SUBCASE("retargeted carry in the adder breaks sums") {
    bool found = false;
    for (std::uint64_t seed = 0; seed < 400 && !found; ++seed) {
      auto m = build::mutate_detailed(adder.circuit, seed);
      if (m.kind != build::MutationKind::RetargetOperand ||
          adder.circuit.gates[m.gate_index].kind != ir::GateKind::CCX) {
        continue;
      }
      found = true;
      CAPTURE(m.description);
      std::vector<sim::RegisterValues> inputs;
      for (std::uint64_t a = 0; a < 16; ++a) {
        for (std::uint64_t b = 0; b < 16; ++b) inputs.push_back(regs({{"a", a}, {"b", b}}));
      }
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto o = kmtest::brute_branches(m.circuit, inputs[i]);
        const auto want = (value(inputs[i], "a") + value(inputs[i], "b")) % 16;
        if (!o.outputs_agree || !o.phase_plus_everywhere || value(o.outputs, "b") != want) ++wrong;
      }
      CHECK(wrong > 0);
      CHECK(wrong < inputs.size());
    }
    CHECK(found);
  }

  ir::Circuit empty;
  CHECK_THROWS_AS(build::mutate(empty, 1), build::BuildError);
}

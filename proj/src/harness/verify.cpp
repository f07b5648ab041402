#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "kickmix/harness.hpp"

namespace kickmix::harness {

namespace {

enum class Policy { Correct, Undefined, Wraps };

struct Layout {
  CircuitKind kind = CircuitKind::FixedPoint;
  unsigned nb = 0;
  unsigned window_bits = 0;
  std::vector<std::string> preserved;  // input registers that must come back unchanged
};

struct Case {
  std::uint64_t index = 0;
  ec::CurvePoint acc = ec::CurvePoint::infinity();
  ec::CurvePoint operand = ec::CurvePoint::infinity();
  std::optional<std::uint64_t> window;
};

const ir::Register& require(const std::vector<ir::Register>& regs, const std::string& name, unsigned width,
                            const char* side) {
  for (const ir::Register& r : regs) {
    if (r.name == name) {
      if (width != 0 && r.width() != width) {
        throw HarnessError(std::string(side) + " register '" + name + "' is " + std::to_string(r.width()) +
                           " bits wide, expected " + std::to_string(width));
      }
      return r;
    }
  }
  throw HarnessError("register mapping names '" + name + "' but the circuit has no such " + side + " register");
}

Layout resolve_layout(const ir::Circuit& c, const VerificationSpec& spec, const ec::CurveParams& curve) {
  Layout l;
  l.kind = spec.kind();
  l.nb = curve.coordinate_bits();
  std::vector<std::string> mapped{spec.registers.acc_x, spec.registers.acc_y};
  if (spec.registers.point_x) {
    mapped.push_back(*spec.registers.point_x);
    mapped.push_back(*spec.registers.point_y);
  }
  if (spec.registers.window) mapped.push_back(*spec.registers.window);
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (mapped[i] == mapped[j]) throw HarnessError("register '" + mapped[i] + "' is mapped twice");
    }
  }
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    const bool coordinate = !(spec.registers.window && i + 1 == mapped.size());
    const unsigned width = coordinate ? l.nb : 0;
    require(c.inputs, mapped[i], width, "input");
    const ir::Register& out = require(c.outputs, mapped[i], width, "output");
    if (!coordinate) {
      l.window_bits = out.width();
      if (c.find_input(mapped[i])->width() != out.width()) {
        throw HarnessError("window register '" + mapped[i] + "' changes width between input and output");
      }
    }
    if (i >= 2) l.preserved.push_back(mapped[i]);
  }
  for (const ir::Register& r : c.inputs) {
    if (std::find(mapped.begin(), mapped.end(), r.name) == mapped.end()) {
      throw HarnessError("circuit input register '" + r.name + "' is not in the register mapping");
    }
  }
  if (l.kind == CircuitKind::Windowed && l.window_bits > 20) throw HarnessError("window register too wide");
  return l;
}

Policy exceptional_policy(const ir::Circuit& c) {
  const auto v = c.meta("exceptional");
  if (!v || *v == "correct") return Policy::Correct;
  if (*v == "undefined") return Policy::Undefined;
  if (*v == "wraps") return Policy::Wraps;
  throw HarnessError("unknown exceptional-input policy '" + *v + "'");
}

std::pair<BigInt, BigInt> encode(const ec::CurvePoint& p, unsigned nb) {
  if (p.is_infinity()) {
    BigInt ones = (BigInt{1} << nb) - 1;
    return {ones, ones};
  }
  return {p.x(), p.y()};
}

std::string decode(const BigInt& x, const BigInt& y, unsigned nb) {
  const BigInt ones = (BigInt{1} << nb) - 1;
  if (x == ones && y == ones) return "inf";
  return x.str() + "," + y.str();
}

std::pair<BigInt, BigInt> to_rational(double v) {
  int e = 0;
  const double f = std::frexp(v, &e);
  BigInt mant = static_cast<std::int64_t>(std::ldexp(f, 53));
  if (e >= 53) return {mant << (e - 53), BigInt{1}};
  return {mant, BigInt{1} << (53 - e)};
}

void reduce(BigInt& num, BigInt& den) {
  BigInt g = boost::multiprecision::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

struct Context {
  const ir::Circuit* circuit;
  const VerificationSpec* spec;
  const ec::CurveParams* curve;
  Layout layout;
  Policy policy;
  crypto::Digest commitment;
  bool analysis = false;  // exhaustive over branch-analysable circuit
  bool brute = false;     // exhaustive, explicit branch enumeration
  std::size_t measurements = 0;
  std::uint64_t unconditioned_nc = 0;
  std::uint64_t conditioned_nc = 0;
  sim::Kernel kernel = sim::Kernel::Auto;
};

sim::RegisterValues inputs_for(const Context& ctx, const Case& tc) {
  const auto& regs = ctx.spec->registers;
  sim::RegisterValues in;
  auto [ax, ay] = encode(tc.acc, ctx.layout.nb);
  in.emplace(regs.acc_x, ax);
  in.emplace(regs.acc_y, ay);
  if (ctx.layout.kind == CircuitKind::TwoPoint) {
    auto [px, py] = encode(tc.operand, ctx.layout.nb);
    in.emplace(*regs.point_x, px);
    in.emplace(*regs.point_y, py);
  } else if (ctx.layout.kind == CircuitKind::Windowed) {
    in.emplace(*regs.window, BigInt{*tc.window});
  }
  return in;
}

TestResult start_result(const Context& ctx, const Case& tc) {
  TestResult r;
  r.index = tc.index;
  r.acc = ec::format_point(tc.acc);
  r.operand = ec::format_point(tc.operand);
  r.window = tc.window;
  r.expected = ec::format_point(ec::point_add(tc.acc, tc.operand, *ctx.curve));
  r.exceptional = ec::is_exceptional_sum(tc.acc, tc.operand, *ctx.curve);
  return r;
}

void judge(const Context& ctx, const Case& tc, const sim::RegisterValues& in, const sim::RegisterValues& out,
           TestResult& r) {
  const auto& regs = ctx.spec->registers;
  auto [ex, ey] = encode(ec::point_add(tc.acc, tc.operand, *ctx.curve), ctx.layout.nb);
  const BigInt& ox = out.at(regs.acc_x);
  const BigInt& oy = out.at(regs.acc_y);
  r.actual = decode(ox, oy, ctx.layout.nb);
  r.output_match = r.output_match && ox == ex && oy == ey;
  for (const std::string& name : ctx.layout.preserved) {
    if (out.at(name) != in.at(name)) r.inputs_preserved = false;
  }
}

void finish_status(const Context& ctx, TestResult& r) {
  const bool ok = r.output_match && r.phase_ok && r.inputs_preserved;
  if (r.exceptional && ctx.policy == Policy::Wraps) {
    r.status = ok ? TestStatus::Pass : TestStatus::Wrapped;
  } else {
    r.status = ok ? TestStatus::Pass : TestStatus::Fail;
  }
}

void run_chunk(const Context& ctx, const std::vector<Case>& cases, std::size_t begin, std::size_t end,
               std::vector<TestResult>& results) {
  std::vector<std::size_t> live;
  for (std::size_t i = begin; i < end; ++i) {
    results[i] = start_result(ctx, cases[i]);
    if (results[i].exceptional && ctx.policy == Policy::Undefined) {
      results[i].status = TestStatus::Skipped;
      results[i].actual = "";
    } else {
      live.push_back(i);
    }
  }
  if (live.empty()) return;

  if (ctx.brute) {
    for (std::size_t i : live) {
      TestResult& r = results[i];
      const auto in = inputs_for(ctx, cases[i]);
      const auto branches = sim::run_all_measurement_branches(*ctx.circuit, in, ctx.spec->branch_limit);
      BigInt total = 0;
      for (std::size_t k = 0; k < branches.size(); ++k) {
        const sim::RunResult& b = branches[k];
        TestResult probe;
        judge(ctx, cases[i], in, b.outputs, probe);
        const bool good = probe.output_match && probe.inputs_preserved;
        if (k == 0 || (!good && r.output_match && r.inputs_preserved)) r.actual = probe.actual;
        r.output_match = r.output_match && probe.output_match;
        r.inputs_preserved = r.inputs_preserved && probe.inputs_preserved;
        if (b.phase != 1) r.phase_ok = false;
        total += b.executed_non_clifford;
      }
      r.nc_num = total;
      r.nc_den = branches.size();
      reduce(r.nc_num, r.nc_den);
      finish_status(ctx, r);
    }
    return;
  }

  sim::Batch batch(*ctx.circuit, live.size());
  std::vector<sim::RegisterValues> ins(live.size());
  const std::size_t bytes = (ctx.measurements + 7) / 8;
  for (std::size_t lane = 0; lane < live.size(); ++lane) {
    ins[lane] = inputs_for(ctx, cases[live[lane]]);
    batch.set_input(lane, ins[lane]);
    if (!ctx.analysis && bytes > 0) {
      batch.set_measurements(lane, measurement_stream(ctx.commitment, cases[live[lane]].index, bytes));
    }
  }
  batch.run(ctx.kernel, ctx.analysis ? sim::BatchMode::BranchAnalysis : sim::BatchMode::Sample);
  for (std::size_t lane = 0; lane < live.size(); ++lane) {
    TestResult& r = results[live[lane]];
    judge(ctx, cases[live[lane]], ins[lane], batch.outputs(lane), r);
    r.phase_ok = batch.phase(lane) == 1 && !(ctx.analysis && batch.phase_varies(lane));
    if (ctx.analysis) {
      r.nc_num = 2 * BigInt{ctx.unconditioned_nc} + ctx.conditioned_nc;
      r.nc_den = 2;
      reduce(r.nc_num, r.nc_den);
    } else {
      r.nc_num = batch.executed_non_clifford(lane);
      r.nc_den = 1;
    }
    finish_status(ctx, r);
  }
}

std::vector<Case> transcript_cases(const Context& ctx, std::span<const std::uint8_t> bytes,
                                   const ec::CurvePoint& base) {
  const Transcript t = derive_tests(bytes, *ctx.spec, *ctx.curve, ctx.layout.window_bits);
  std::vector<Case> cases;
  cases.reserve(t.tests.size());
  for (const TestCase& tc : t.tests) {
    Case c;
    c.index = tc.index;
    c.acc = ec::scalar_mul(tc.acc_scalar, ctx.curve->generator, *ctx.curve);
    switch (ctx.layout.kind) {
      case CircuitKind::FixedPoint: c.operand = base; break;
      case CircuitKind::TwoPoint: c.operand = ec::scalar_mul(*tc.point_scalar, ctx.curve->generator, *ctx.curve); break;
      case CircuitKind::Windowed:
        c.window = tc.window;
        c.operand = ec::scalar_mul(BigInt{*tc.window}, base, *ctx.curve);
        break;
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<Case> exhaustive_cases(const Context& ctx, const ec::CurvePoint& base) {
  std::vector<ec::CurvePoint> points;
  try {
    points = ec::enumerate_points(*ctx.curve);
  } catch (const ec::CurveError&) {
    throw HarnessError("exhaustive verification needs an enumerable toy curve, not " + ctx.curve->name);
  }
  std::vector<Case> cases;
  auto add = [&](const ec::CurvePoint& acc, const ec::CurvePoint& operand, std::optional<std::uint64_t> window) {
    Case c;
    c.index = cases.size();
    c.acc = acc;
    c.operand = operand;
    c.window = window;
    cases.push_back(std::move(c));
  };
  switch (ctx.layout.kind) {
    case CircuitKind::FixedPoint:
      for (const auto& q : points) add(q, base, std::nullopt);
      break;
    case CircuitKind::TwoPoint:
      for (const auto& t : points) {
        for (const auto& q : points) add(q, t, std::nullopt);
      }
      break;
    case CircuitKind::Windowed:
      for (std::uint64_t k = 0; k < (std::uint64_t{1} << ctx.layout.window_bits); ++k) {
        const ec::CurvePoint p = ec::scalar_mul(BigInt{k}, base, *ctx.curve);
        for (const auto& q : points) add(q, p, k);
      }
      break;
  }
  return cases;
}

}  // namespace

VerificationReport verify(std::span<const std::uint8_t> circuit_bytes, const VerificationSpec& spec,
                          const VerifyOptions& options) {
  const std::string_view text(reinterpret_cast<const char*>(circuit_bytes.data()), circuit_bytes.size());
  const ir::Circuit circuit = ir::parse(text);
  return verify(circuit, circuit_bytes, spec, options);
}

VerificationReport verify(const ir::Circuit& circuit, std::span<const std::uint8_t> circuit_bytes,
                          const VerificationSpec& spec, const VerifyOptions& options) {
  const ec::CurveParams* curve = nullptr;
  try {
    curve = &ec::named_curve(spec.curve);
  } catch (const ec::CurveError& e) {
    throw HarnessError(e.what());
  }
  if (auto named = circuit.meta("curve"); named && *named != spec.curve) {
    throw HarnessError("circuit metadata names curve '" + *named + "' but the spec asks for '" + spec.curve + "'");
  }

  Context ctx;
  ctx.circuit = &circuit;
  ctx.spec = &spec;
  ctx.curve = curve;
  ctx.layout = resolve_layout(circuit, spec, *curve);
  ctx.policy = exceptional_policy(circuit);
  ctx.commitment = commit(circuit_bytes);
  ctx.kernel = options.kernel;
  for (const ir::Gate& g : circuit.gates) {
    if (g.kind == ir::GateKind::MX) ++ctx.measurements;
    if (ir::is_non_clifford(g.kind)) ++(g.condition ? ctx.conditioned_nc : ctx.unconditioned_nc);
  }
  if (spec.exhaustive) {
    if (sim::branch_analyzable(circuit)) {
      ctx.analysis = true;
    } else if (ctx.measurements <= spec.branch_limit) {
      ctx.brute = true;
    } else {
      throw HarnessError("exhaustive verification of a circuit with non-diagonal conditioned gates needs at most " +
                         std::to_string(spec.branch_limit) + " measurements");
    }
  }
  sim::resolve_kernel(options.kernel);

  ec::CurvePoint base = curve->generator;
  if (ctx.layout.kind != CircuitKind::TwoPoint && spec.base == BaseSource::Metadata) {
    auto text = circuit.meta("base");
    if (!text) throw HarnessError("spec takes the base point from metadata but the circuit declares no 'base'");
    try {
      base = ec::parse_point(*text, *curve);
    } catch (const ec::CurveError& e) {
      throw HarnessError(std::string("metadata base point: ") + e.what());
    }
  }

  const std::vector<Case> cases =
      spec.exhaustive ? exhaustive_cases(ctx, base) : transcript_cases(ctx, circuit_bytes, base);

  std::vector<TestResult> results(cases.size());
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_lanes);
  const std::size_t chunks = (cases.size() + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(chunks);
  auto worker = [&] {
    for (std::size_t k = next++; k < chunks; k = next++) {
      try {
        run_chunk(ctx, cases, k * chunk, std::min(cases.size(), (k + 1) * chunk), results);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::max<std::size_t>(1, chunks))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  VerificationReport rep;
  rep.commitment_hex = crypto::to_hex(ctx.commitment);
  rep.spec = spec;
  rep.kind = ctx.layout.kind;
  if (ctx.layout.kind != CircuitKind::TwoPoint) rep.base = ec::format_point(base);
  rep.resources = ir::static_resources(circuit);

  BigInt num = 0, den = 1;
  std::uint64_t run = 0;
  for (const TestResult& r : results) {
    switch (r.status) {
      case TestStatus::Pass: break;
      case TestStatus::Fail: ++rep.failures; break;
      case TestStatus::Skipped: ++rep.skipped; break;
      case TestStatus::Wrapped: ++rep.wrapped_mismatches; break;
    }
    if (r.exceptional && ctx.policy == Policy::Wraps) ++rep.wrapped;
    if (r.status == TestStatus::Skipped) continue;
    ++run;
    num = num * r.nc_den + r.nc_num * den;
    den *= r.nc_den;
    reduce(num, den);
  }
  if (run > 0) {
    den *= run;
    reduce(num, den);
  }
  rep.avg_nc_num = num;
  rep.avg_nc_den = den;
  rep.tests = std::move(results);

  if (spec.max_non_clifford) {
    auto [bn, bd] = to_rational(*spec.max_non_clifford);
    rep.non_clifford_ok = num * bd <= bn * den;
  }
  if (spec.max_qubits) rep.qubits_ok = rep.resources.qubit_count <= *spec.max_qubits;
  if (spec.max_total_ops) rep.total_ops_ok = rep.resources.total_gate_count <= *spec.max_total_ops;

  if (!spec.exhaustive && spec.epsilon > 0) {
    const std::uint64_t need = required_test_count(spec.epsilon, spec.security_bits);
    if (spec.test_count < need) {
      std::ostringstream w;
      w << "test_count " << spec.test_count << " is below the " << need << " tests needed for epsilon "
        << spec.epsilon << " at " << spec.security_bits << " security bits";
      rep.warnings.push_back(w.str());
    }
  }
  if (rep.skipped > 0) {
    rep.warnings.push_back(std::to_string(rep.skipped) + " exceptional input(s) skipped under policy 'undefined'");
  }

  std::uint64_t allowed = 0;
  if (spec.allow_failures) allowed = static_cast<std::uint64_t>(std::floor(spec.epsilon * static_cast<double>(run)));
  rep.pass = rep.failures <= allowed && rep.non_clifford_ok && rep.qubits_ok && rep.total_ops_ok;
  return rep;
}

}  // namespace kickmix::harness

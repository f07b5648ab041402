#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kickmix/build.hpp"
#include "kickmix/harness.hpp"

namespace kickmix::cli {

using nlohmann::json;

namespace {

const char* kExitCodes =
    "\nEXIT STATUS\n"
    "  0  success (verification passed)\n"
    "  1  verification failed, or a circuit did not parse\n"
    "  2  usage error: bad flags, unreadable files, invalid parameters or schema\n"
    "\nENVIRONMENT\n"
    "  KICKMIX_CURVES  JSON file of extra curves {name, p, a, b, gx, gy, order}\n"
    "  KICKMIX_KERNEL  simulation kernel when --kernel is auto (scalar, portable, avx2)\n";

json resources_json(const ir::StaticResources& r) {
  return {{"qubits", r.qubit_count},
          {"total_ops", r.total_gate_count},
          {"non_clifford", r.non_clifford_gate_count},
          {"measurements", r.measurement_count}};
}

json registers_json(const std::vector<ir::Register>& regs) {
  json a = json::array();
  for (const auto& r : regs) a.push_back({{"name", r.name}, {"lo", r.lo}, {"hi", r.hi}, {"width", r.width()}});
  return a;
}

struct FileParseError {
  std::string path;
  ir::ParseError error;
};

ir::Circuit parse_file(const std::string& path, const std::string& text) {
  try {
    return ir::parse(text);
  } catch (const ir::ParseError& e) {
    throw FileParseError{path, e};
  }
}

// ---- build ----------------------------------------------------------------

struct BuildArgs {
  std::string construction;
  std::string output;
  unsigned width = 4;
  std::uint64_t constant = 0;
  std::uint64_t modulus = 0;
  std::string table;
  unsigned entry_width = 0;
  std::string curve = "toy-p11-b7";
  std::string point = "G";
  unsigned window = 2;
  std::optional<std::uint64_t> mutate_seed;
};

std::vector<std::uint64_t> parse_table(const std::string& text) {
  std::vector<std::uint64_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(item, &used, 0));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("table entry '" + item + "' is not an unsigned integer");
    }
  }
  return v;
}

build::BuildReport run_builder(const BuildArgs& a) {
  const std::string& k = a.construction;
  if (k == "temp-and") return build::build_temp_and();
  if (k == "adder") return build::build_adder(a.width);
  if (k == "mod-add") return build::build_mod_add_const(a.width, a.constant, a.modulus);
  if (k == "lookup") {
    const auto table = parse_table(a.table);
    unsigned w = 0;
    while ((std::size_t{1} << w) < table.size()) ++w;
    if (table.empty() || (std::size_t{1} << w) != table.size()) {
      throw UsageError("--table needs a power-of-two number of entries");
    }
    unsigned d = a.entry_width;
    if (d == 0) {
      const std::uint64_t top = *std::max_element(table.begin(), table.end());
      d = 1;
      while (d < 64 && (top >> d) != 0) ++d;
    }
    return build::build_lookup(table, w, d);
  }
  if (k == "pointadd" || k == "windowed") {
    const ec::CurveParams* curve = nullptr;
    ec::CurvePoint point = ec::CurvePoint::infinity();
    try {
      curve = &ec::named_curve(a.curve);
      point = ec::parse_point(a.point, *curve);
    } catch (const ec::CurveError& e) {
      throw UsageError(e.what());
    }
    return k == "pointadd" ? build::build_pointadd_permutation(*curve, point)
                           : build::build_windowed_pointadd(*curve, point, a.window);
  }
  throw UsageError("unknown construction '" + k + "'");
}

int cmd_build(const BuildArgs& a, std::ostream& out) {
  build::BuildReport r;
  try {
    r = run_builder(a);
  } catch (const build::BuildError& e) {
    throw UsageError(e.what());
  }
  json sidecar;
  sidecar["construction"] = std::string(build::construction_name(r.construction));
  sidecar["predicted"] = resources_json(r.predicted);
  sidecar["terms"] = r.terms;
  if (a.mutate_seed) {
    const auto m = build::mutate_detailed(r.circuit, *a.mutate_seed);
    r.circuit = m.circuit;
    sidecar["mutation"] = {{"seed", *a.mutate_seed}, {"gate", m.gate_index}, {"description", m.description}};
  }
  const std::string text = ir::serialize(r.circuit);
  const auto stat = ir::static_resources(r.circuit);
  sidecar["static"] = resources_json(stat);
  sidecar["metadata"] = r.circuit.metadata;
  sidecar["circuit_sha256"] = crypto::to_hex(crypto::sha256(text));
  write_file(a.output, text);
  write_file(a.output + ".json", harness::canonical_dump(sidecar));

  out << "wrote " << a.output << " (" << sidecar["construction"].get<std::string>() << ")\n"
      << "predicted: qubits " << r.predicted.qubit_count << ", total ops " << r.predicted.total_gate_count
      << ", non-Clifford " << r.predicted.non_clifford_gate_count << ", measurements "
      << r.predicted.measurement_count << "\n";
  if (a.mutate_seed) out << "mutated: " << sidecar["mutation"]["description"].get<std::string>() << "\n";
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string circuit;
  std::string spec;
  std::string output;
  unsigned jobs = 1;
  bool exhaustive = false;
  std::optional<std::string> curve;
  std::optional<unsigned> branch_limit;
  std::optional<std::uint64_t> tests;
  std::string kernel = "auto";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(a.circuit);
  harness::VerificationSpec spec;
  if (!a.spec.empty()) {
    json j;
    try {
      j = json::parse(read_file(a.spec));
    } catch (const json::exception& e) {
      throw UsageError(a.spec + ": " + e.what());
    }
    try {
      spec = harness::parse_spec(j);
    } catch (const harness::HarnessError& e) {
      throw UsageError(a.spec + ": " + e.what());
    }
  }
  if (a.curve) spec.curve = *a.curve;
  if (a.exhaustive) spec.exhaustive = true;
  if (a.branch_limit) spec.branch_limit = *a.branch_limit;
  if (a.tests) spec.test_count = *a.tests;

  harness::VerifyOptions opt;
  opt.jobs = std::max(1U, a.jobs);
  const auto kernel = sim::parse_kernel(a.kernel);
  if (!kernel) throw UsageError("unknown kernel '" + a.kernel + "'");
  opt.kernel = *kernel;

  const ir::Circuit circuit = parse_file(a.circuit, text);
  const auto bytes = std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  harness::VerificationReport rep;
  try {
    rep = harness::verify(circuit, bytes, spec, opt);
  } catch (const harness::HarnessError& e) {
    throw UsageError(e.what());
  } catch (const sim::SimError& e) {
    throw UsageError(e.what());
  }
  const std::string dumped = harness::canonical_dump(rep.envelope());
  std::ostream& summary = a.output.empty() ? err : out;
  if (a.output.empty()) {
    out << dumped;
  } else {
    write_file(a.output, dumped);
  }
  summary << "verdict: " << (rep.pass ? "pass" : "fail") << " (" << rep.tests.size() << " tests, " << rep.failures
          << " failed, " << rep.skipped << " skipped, " << rep.wrapped_mismatches << " wrapped)\n"
          << "average executed non-Clifford: " << harness::fixed6(rep.avg_nc_num, rep.avg_nc_den) << "\n"
          << "report digest: " << rep.digest_hex() << "\n";
  for (const auto& w : rep.warnings) summary << "warning: " << w << "\n";
  std::size_t shown = 0;
  for (const auto& t : rep.tests) {
    if (t.status != harness::TestStatus::Fail) continue;
    if (shown++ == 10) {
      summary << "  ...\n";
      break;
    }
    summary << "  test " << t.index << ": " << t.acc << " + " << t.operand << " expected " << t.expected << " got "
            << t.actual << (t.phase_ok ? "" : " [phase]") << (t.inputs_preserved ? "" : " [operand modified]") << "\n";
  }
  for (const char* b : {"max_non_clifford", "max_qubits", "max_total_ops"}) {
    if (!rep.body()["bounds"][b].get<bool>()) summary << "  bound exceeded: " << b << "\n";
  }
  return rep.pass ? kOk : kFailed;
}

// ---- inspect --------------------------------------------------------------

int cmd_inspect(const std::string& path, bool as_json, bool histogram, std::ostream& out) {
  const ir::Circuit c = parse_file(path, read_file(path));
  const auto r = ir::static_resources(c);
  std::map<std::string, std::uint64_t> hist;
  if (histogram) {
    for (const auto& g : c.gates) hist[(g.condition ? "IF " : "") + std::string(ir::opcode(g.kind))]++;
  }
  if (as_json) {
    json j;
    j["file"] = path;
    j["resources"] = resources_json(r);
    j["cbits"] = c.cbit_count;
    j["inputs"] = registers_json(c.inputs);
    j["outputs"] = registers_json(c.outputs);
    j["metadata"] = c.metadata;
    j["branch_analyzable"] = sim::branch_analyzable(c);
    if (histogram) j["histogram"] = hist;
    out << harness::canonical_dump(j);
    return kOk;
  }
  out << "file: " << path << "\n"
      << "qubits: " << r.qubit_count << "\n"
      << "cbits: " << c.cbit_count << "\n"
      << "total ops: " << r.total_gate_count << "\n"
      << "non-Clifford: " << r.non_clifford_gate_count << "\n"
      << "measurements: " << r.measurement_count << "\n"
      << "branch analyzable: " << (sim::branch_analyzable(c) ? "yes" : "no") << "\n";
  for (const auto& [side, regs] : {std::pair{"in", &c.inputs}, std::pair{"out", &c.outputs}}) {
    for (const auto& reg : *regs) out << side << " " << reg.name << " " << reg.lo << ".." << reg.hi << "\n";
  }
  for (const auto& [k, v] : c.metadata) out << "meta " << k << " " << v << "\n";
  if (histogram) {
    out << "histogram:\n";
    for (const auto& [k, n] : hist) out << "  " << k << " " << n << "\n";
  }
  return kOk;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw UsageError("cannot write " + path);
  o << contents;
  if (!o) throw UsageError("error writing " + path);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kickmix: build, verify and cost kickmix circuits for elliptic-curve point addition", "kickmix"};
  app.footer(kExitCodes);
  app.require_subcommand(1, 1);

  BuildArgs b;
  auto* build = app.add_subcommand("build", "Synthesize a circuit and write it with a .json sidecar");
  build->add_option("construction", b.construction, "temp-and | adder | mod-add | lookup | pointadd | windowed")
      ->required()
      ->check(CLI::IsMember({"temp-and", "adder", "mod-add", "lookup", "pointadd", "windowed"}));
  build->add_option("-o,--output", b.output, "Circuit file to write; the sidecar goes to <output>.json")->required();
  build->add_option("--width", b.width, "Register width for adder and mod-add")->capture_default_str();
  build->add_option("--constant", b.constant, "Constant c for mod-add");
  build->add_option("--modulus", b.modulus, "Modulus p for mod-add");
  build->add_option("--table", b.table, "Comma-separated lookup table, 2^w entries");
  build->add_option("--entry-width", b.entry_width, "Lookup entry width (default: widest entry)");
  build->add_option("--curve", b.curve, "Curve for pointadd and windowed")->capture_default_str();
  build->add_option("--point", b.point, "Addend or window base: G, inf, <k>G or x,y")->capture_default_str();
  build->add_option("--window", b.window, "Window bits for windowed")->capture_default_str();
  build->add_option("--mutate", b.mutate_seed, "Apply one seeded mutation before writing");
  build->footer(kExitCodes);

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "Fuzz-test a circuit against the curve group law");
  verify->add_option("circuit", v.circuit, "Circuit file (.kmx)")->required();
  verify->add_option("-s,--spec", v.spec, "Verification spec JSON");
  verify->add_option("-o,--output", v.output, "Report file (default: stdout, summary on stderr)");
  verify->add_option("-j,--jobs", v.jobs, "Worker threads")->capture_default_str();
  verify->add_flag("--exhaustive", v.exhaustive, "Every accumulator point and every measurement branch");
  verify->add_option("--curve", v.curve, "Override the spec's curve");
  verify->add_option("--branch-limit", v.branch_limit, "Most measurements to enumerate explicitly");
  verify->add_option("--tests", v.tests, "Override the spec's test count");
  verify->add_option("--kernel", v.kernel, "auto | scalar | portable | avx2")->capture_default_str();
  verify->footer(kExitCodes);

  std::string scenario, est_out, salvage_csv, sweep_csv;
  auto* estimate = app.add_subcommand("estimate", "Resource and attack-timing estimates from a JSON scenario");
  estimate->add_option("scenario", scenario, "Scenario JSON")->required();
  estimate->add_option("-o,--output", est_out, "Results file (default: stdout)");
  estimate->add_option("--salvage-csv", salvage_csv, "Write the salvage curve as CSV");
  estimate->add_option("--sweep-csv", sweep_csv, "Write on-spend success versus attack time as CSV");
  estimate->footer(kExitCodes);

  std::string inspect_path;
  bool as_json = false, histogram = false;
  auto* inspect = app.add_subcommand("inspect", "Print static resources, registers and metadata");
  inspect->add_option("circuit", inspect_path, "Circuit file (.kmx)")->required();
  inspect->add_flag("--json", as_json, "Machine-readable output");
  inspect->add_flag("--histogram", histogram, "Gate counts per opcode");
  inspect->footer(kExitCodes);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // Help for the subcommand that was being parsed, if any.
    for (const auto* sub : app.get_subcommands()) err << sub->help();
    return kUsage;
  }

  try {
    if (*build) return cmd_build(b, out);
    if (*verify) return cmd_verify(v, out, err);
    if (*estimate) return run_estimate(scenario, est_out, salvage_csv, sweep_csv, out);
    if (*inspect) return cmd_inspect(inspect_path, as_json, histogram, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FileParseError& e) {
    err << e.path << ":" << e.error.line() << ":" << e.error.column() << ": error: " << e.error.message() << "\n";
    return kFailed;
  } catch (const ec::CurveError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace kickmix::cli

#include <iomanip>
#include <sstream>

#include "kickmix/harness.hpp"

namespace kickmix::harness {

using nlohmann::json;

namespace {

const char* status_name(TestStatus s) {
  switch (s) {
    case TestStatus::Pass: return "pass";
    case TestStatus::Fail: return "fail";
    case TestStatus::Skipped: return "skipped";
    case TestStatus::Wrapped: return "wrapped";
  }
  return "?";
}

const char* kind_name(CircuitKind k) {
  switch (k) {
    case CircuitKind::FixedPoint: return "fixed_point";
    case CircuitKind::TwoPoint: return "two_point";
    case CircuitKind::Windowed: return "windowed";
  }
  return "?";
}

json protocol(const VerificationReport& r) {
  json p = {{"commitment", "sha256(circuit bytes)"},
            {"master_stream", "shake256(circuit bytes)"},
            {"scalar_encoding", "ceil(order_bits/8) bytes, big-endian, reduced mod generator order"},
            {"test_point", "scalar * generator"},
            {"measurement_stream", "shake256(commitment || be64(test index)), LSB-first per byte"},
            {"measurement_note", "measurement bits are derived per test, not interleaved with the master stream"},
            {"infinity_encoding", "all-ones coordinates"}};
  if (r.kind == CircuitKind::TwoPoint) p["draw_order"] = "per test: accumulator scalar, point scalar";
  if (r.kind == CircuitKind::Windowed) {
    p["draw_order"] = "per test: accumulator scalar, window index";
    p["window_encoding"] = "ceil(w/8) bytes, big-endian, reduced mod 2^w";
  }
  if (r.kind == CircuitKind::FixedPoint) p["draw_order"] = "per test: accumulator scalar";
  if (r.spec.exhaustive) {
    p["domain"] = "every curve point as accumulator";
    p["branches"] = "all measurement outcomes";
  }
  return p;
}

}  // namespace

std::string rational_string(const BigInt& num, const BigInt& den) {
  BigInt g = boost::multiprecision::gcd(num, den);
  if (g == 0) g = 1;
  const BigInt n = num / g, d = den / g;
  return d == 1 ? n.str() : n.str() + "/" + d.str();
}

std::string fixed6(const BigInt& num, const BigInt& den) {
  const BigInt scale = 1'000'000;
  const BigInt q = (num * scale * 2 + den) / (den * 2);
  std::ostringstream os;
  os << BigInt(q / scale).str() << '.' << std::setw(6) << std::setfill('0') << BigInt(q % scale).str();
  return os.str();
}

json VerificationReport::body() const {
  json tests_json = json::array();
  json failures_json = json::array();
  for (const TestResult& t : tests) {
    json e = {{"index", t.index},
              {"status", status_name(t.status)},
              {"accumulator", t.acc},
              {"addend", t.operand},
              {"expected", t.expected},
              {"actual", t.actual},
              {"output_match", t.output_match},
              {"phase_ok", t.phase_ok},
              {"inputs_preserved", t.inputs_preserved},
              {"exceptional", t.exceptional},
              {"executed_non_clifford", rational_string(t.nc_num, t.nc_den)}};
    if (t.window) e["window"] = *t.window;
    if (t.status == TestStatus::Fail || t.status == TestStatus::Wrapped) {
      json why = json::array();
      if (!t.output_match) why.push_back("output_mismatch");
      if (!t.phase_ok) why.push_back("phase");
      if (!t.inputs_preserved) why.push_back("operand_modified");
      failures_json.push_back({{"index", t.index},
                               {"kind", why},
                               {"wrapped", t.status == TestStatus::Wrapped},
                               {"expected", t.expected},
                               {"actual", t.actual}});
    }
    tests_json.push_back(std::move(e));
  }
  std::vector<std::string> violations;
  if (!non_clifford_ok) violations.push_back("max_non_clifford");
  if (!qubits_ok) violations.push_back("max_qubits");
  if (!total_ops_ok) violations.push_back("max_total_ops");

  json j;
  j["commitment"] = commitment_hex;
  j["spec"] = spec_to_json(spec);
  j["circuit_kind"] = kind_name(kind);
  j["base_point"] = base.empty() ? json(nullptr) : json(base);
  j["protocol"] = protocol(*this);
  j["resources"] = {{"qubits", resources.qubit_count},
                    {"total_ops", resources.total_gate_count},
                    {"static_non_clifford", resources.non_clifford_gate_count},
                    {"measurements", resources.measurement_count},
                    {"average_executed_non_clifford", fixed6(avg_nc_num, avg_nc_den)},
                    {"average_executed_non_clifford_exact", rational_string(avg_nc_num, avg_nc_den)}};
  j["bounds"] = {{"max_non_clifford", non_clifford_ok},
                 {"max_qubits", qubits_ok},
                 {"max_total_ops", total_ops_ok}};
  j["resource_violations"] = violations;
  j["counts"] = {{"tests", tests.size()},
                 {"failed", failures},
                 {"skipped_exceptional", skipped},
                 {"wrapped_exceptional", wrapped},
                 {"wrapped_mismatches", wrapped_mismatches}};
  j["tests"] = std::move(tests_json);
  j["failures"] = std::move(failures_json);
  j["warnings"] = warnings;
  j["verdict"] = pass ? "pass" : "fail";
  return j;
}

std::string VerificationReport::digest_hex() const { return crypto::to_hex(crypto::sha256(body().dump())); }

json VerificationReport::envelope() const {
  json b = body();
  const std::string digest = crypto::to_hex(crypto::sha256(b.dump()));
  return {{"report", std::move(b)}, {"report_digest", digest}};
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace kickmix::harness

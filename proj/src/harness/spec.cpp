#include <set>

#include "kickmix/harness.hpp"

namespace kickmix::harness {

using nlohmann::json;

CircuitKind VerificationSpec::kind() const {
  if (registers.window) return CircuitKind::Windowed;
  if (registers.point_x || registers.point_y) return CircuitKind::TwoPoint;
  return CircuitKind::FixedPoint;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw HarnessError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw HarnessError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw HarnessError(std::string("spec field '") + key + "' has the wrong type");
  }
}

std::uint64_t get_count(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw HarnessError(std::string("spec field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

VerificationSpec parse_spec(const json& j) {
  check_keys(j,
             {"curve", "registers", "base", "test_count", "max_non_clifford", "max_qubits", "max_total_ops", "epsilon",
              "security_bits", "allow_failures", "exhaustive", "branch_limit"},
             "spec");
  VerificationSpec s;
  if (j.contains("curve")) s.curve = get_as<std::string>(j, "curve");
  if (j.contains("registers")) {
    const json& r = j.at("registers");
    check_keys(r, {"acc_x", "acc_y", "point_x", "point_y", "window"}, "registers");
    if (r.contains("acc_x")) s.registers.acc_x = get_as<std::string>(r, "acc_x");
    if (r.contains("acc_y")) s.registers.acc_y = get_as<std::string>(r, "acc_y");
    if (r.contains("point_x")) s.registers.point_x = get_as<std::string>(r, "point_x");
    if (r.contains("point_y")) s.registers.point_y = get_as<std::string>(r, "point_y");
    if (r.contains("window")) s.registers.window = get_as<std::string>(r, "window");
    if (s.registers.point_x.has_value() != s.registers.point_y.has_value()) {
      throw HarnessError("registers: point_x and point_y must be given together");
    }
    if (s.registers.window && s.registers.point_x) {
      throw HarnessError("registers: a circuit is either windowed or two-point, not both");
    }
  }
  if (j.contains("base")) {
    const auto b = get_as<std::string>(j, "base");
    if (b == "generator") {
      s.base = BaseSource::Generator;
    } else if (b == "metadata") {
      s.base = BaseSource::Metadata;
    } else {
      throw HarnessError("spec field 'base' must be \"generator\" or \"metadata\"");
    }
  }
  if (j.contains("epsilon")) s.epsilon = get_as<double>(j, "epsilon");
  if (!(s.epsilon >= 0 && s.epsilon < 1)) throw HarnessError("epsilon must be in [0, 1)");
  if (j.contains("security_bits")) s.security_bits = get_as<double>(j, "security_bits");
  if (!(s.security_bits > 0)) throw HarnessError("security_bits must be positive");
  if (j.contains("exhaustive")) s.exhaustive = get_as<bool>(j, "exhaustive");
  if (j.contains("allow_failures")) s.allow_failures = get_as<bool>(j, "allow_failures");
  if (j.contains("branch_limit")) s.branch_limit = static_cast<unsigned>(get_count(j, "branch_limit"));
  if (j.contains("test_count")) {
    s.test_count = get_count(j, "test_count");
  } else if (s.epsilon > 0) {
    s.test_count = required_test_count(s.epsilon, s.security_bits);
  } else if (!s.exhaustive) {
    throw HarnessError("test_count is required when epsilon is 0");
  }
  if (j.contains("max_non_clifford") && !j.at("max_non_clifford").is_null()) {
    s.max_non_clifford = get_as<double>(j, "max_non_clifford");
    if (!(*s.max_non_clifford >= 0)) throw HarnessError("max_non_clifford must be non-negative");
  }
  if (j.contains("max_qubits") && !j.at("max_qubits").is_null()) s.max_qubits = get_count(j, "max_qubits");
  if (j.contains("max_total_ops") && !j.at("max_total_ops").is_null()) s.max_total_ops = get_count(j, "max_total_ops");
  return s;
}

json spec_to_json(const VerificationSpec& s) {
  json r = {{"acc_x", s.registers.acc_x}, {"acc_y", s.registers.acc_y}};
  if (s.registers.point_x) r["point_x"] = *s.registers.point_x;
  if (s.registers.point_y) r["point_y"] = *s.registers.point_y;
  if (s.registers.window) r["window"] = *s.registers.window;
  json j = {{"curve", s.curve},
            {"registers", r},
            {"base", s.base == BaseSource::Generator ? "generator" : "metadata"},
            {"test_count", s.test_count},
            {"epsilon", s.epsilon},
            {"security_bits", s.security_bits},
            {"allow_failures", s.allow_failures},
            {"exhaustive", s.exhaustive},
            {"branch_limit", s.branch_limit}};
  j["max_non_clifford"] = s.max_non_clifford ? json(*s.max_non_clifford) : json(nullptr);
  j["max_qubits"] = s.max_qubits ? json(*s.max_qubits) : json(nullptr);
  j["max_total_ops"] = s.max_total_ops ? json(*s.max_total_ops) : json(nullptr);
  return j;
}

}  // namespace kickmix::harness

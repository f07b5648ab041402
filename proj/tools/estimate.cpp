#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "kickmix/cost.hpp"
#include "kickmix/harness.hpp"

namespace kickmix::cli {

using nlohmann::json;

namespace {

// Scenario schema, every section optional:
//
//   point_add:     {pa_toffoli, pa_qubits, n, w, optimize_window}
//   toffoli:       count; overrides the point_add total for the runtime
//   machine:       {reaction_time_s, toffoli_overhead_fraction, round_time_s,
//                   t_state_cost, cultivation_qubits, toffoli_to_t_factor}
//   t_rate:        T states per second for factory sizing
//   attack:        {attack_time_s, block_interval_s, signatures_required, machines}
//                  attack_time_s defaults to the primed runtime
//   multi_machine: {machines, total_point_additions, partition_overhead}
//   salvage:       {per_key_time_s, wallets: [{balance, keys_required, label}]}
//                  per_key_time_s defaults to the attack time
//   sweep:         {max_attack_time_s, steps}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw UsageError(where + ": unknown field '" + k + "'");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw UsageError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t count(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw UsageError(where + "." + key + ": expected a non-negative integer");
}

template <typename T>
void maybe(const json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  if constexpr (std::is_same_v<T, double>) {
    field = number(j, key, where);
  } else if constexpr (std::is_same_v<T, cost::Nanos>) {
    field = cost::from_seconds(number(j, key, where));
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.at(key).is_boolean()) throw UsageError(where + "." + key + ": expected true or false");
    field = j.at(key).get<bool>();
  } else {
    field = static_cast<T>(count(j, key, where));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string number_text(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

json evaluate(const json& scenario, std::vector<cost::SalvagePoint>& salvage_curve,
              std::vector<std::pair<double, double>>& sweep) {
  check_keys(scenario, {"point_add", "toffoli", "machine", "t_rate", "attack", "multi_machine", "salvage", "sweep"},
             "scenario");
  json result = json::object();

  std::optional<std::uint64_t> toffoli;
  if (scenario.contains("point_add")) {
    const json& p = scenario.at("point_add");
    check_keys(p, {"pa_toffoli", "pa_qubits", "n", "w", "optimize_window"}, "point_add");
    cost::PointAddCost c;
    maybe(p, "pa_toffoli", c.pa_toffoli, "point_add");
    maybe(p, "pa_qubits", c.pa_qubits, "point_add");
    maybe(p, "n", c.n, "point_add");
    maybe(p, "w", c.w, "point_add");
    bool optimize = false;
    maybe(p, "optimize_window", optimize, "point_add");
    json r;
    if (optimize) {
      const std::uint64_t pa = c.pa_toffoli;
      c.w = cost::optimal_window([pa](unsigned) { return pa; }, c.n);
      r["optimal_window"] = c.w;
    }
    r["window"] = c.w;
    r["windowed_additions"] = cost::windowed_additions(c.n, c.w);
    r["ecdlp_toffoli"] = cost::ecdlp_toffoli(c);
    r["ecdlp_qubits"] = cost::ecdlp_qubits(c);
    toffoli = cost::ecdlp_toffoli(c);
    result["point_add"] = r;
  }
  if (scenario.contains("toffoli")) toffoli = count(scenario, "toffoli", "scenario");

  cost::MachineProfile m;
  if (scenario.contains("machine")) {
    const json& j = scenario.at("machine");
    check_keys(j, {"reaction_time_s", "toffoli_overhead_fraction", "round_time_s", "t_state_cost",
                   "cultivation_qubits", "toffoli_to_t_factor"},
               "machine");
    maybe(j, "reaction_time_s", m.reaction_time, "machine");
    maybe(j, "toffoli_overhead_fraction", m.toffoli_overhead_fraction, "machine");
    maybe(j, "round_time_s", m.round_time, "machine");
    maybe(j, "t_state_cost", m.t_state_cost, "machine");
    maybe(j, "cultivation_qubits", m.cultivation_qubits, "machine");
    maybe(j, "toffoli_to_t_factor", m.toffoli_to_t_factor, "machine");
  }
  cost::validate(m);

  std::optional<cost::Nanos> primed;
  if (toffoli) {
    const cost::Nanos full = cost::runtime(*toffoli, m);
    json r = {{"toffoli", *toffoli}, {"full_s", cost::to_seconds(full)}, {"full_minutes", cost::to_seconds(full) / 60}};
    if (full > cost::Nanos::zero()) {
      primed = cost::primed_attack_time(full);
      r["primed_s"] = cost::to_seconds(*primed);
      r["primed_minutes"] = cost::to_seconds(*primed) / 60;
    }
    result["runtime"] = r;
    result["slow_clock"] = {{"t_rate", cost::t_rate_from_cultivation(m)},
                            {"key_time_s", cost::to_seconds(cost::slow_clock_key_time(*toffoli, m))},
                            {"key_time_hours", cost::to_seconds(cost::slow_clock_key_time(*toffoli, m)) / 3600}};
  }
  if (scenario.contains("t_rate")) {
    const double rate = number(scenario, "t_rate", "scenario");
    result["t_factory"] = {{"t_rate", rate}, {"qubits", cost::t_factory_qubits(rate, m)}};
  }

  std::optional<cost::Nanos> attack_time = primed;
  if (scenario.contains("attack")) {
    const json& j = scenario.at("attack");
    check_keys(j, {"attack_time_s", "block_interval_s", "signatures_required", "machines"}, "attack");
    cost::AttackScenario s;
    if (primed) s.attack_time = *primed;
    maybe(j, "attack_time_s", s.attack_time, "attack");
    maybe(j, "block_interval_s", s.block_interval, "attack");
    maybe(j, "signatures_required", s.signatures_required, "attack");
    maybe(j, "machines", s.machines, "attack");
    attack_time = s.attack_time;
    result["onspend"] = {{"attack_time_s", cost::to_seconds(s.attack_time)},
                         {"block_interval_s", cost::to_seconds(s.block_interval)},
                         {"signatures_required", s.signatures_required},
                         {"machines", s.machines},
                         {"success_probability", cost::onspend_success(s)}};
    if (scenario.contains("sweep")) {
      const json& w = scenario.at("sweep");
      check_keys(w, {"max_attack_time_s", "steps"}, "sweep");
      double top = 3600;
      std::uint64_t steps = 60;
      maybe(w, "max_attack_time_s", top, "sweep");
      maybe(w, "steps", steps, "sweep");
      if (!(top > 0) || steps == 0 || steps > 1'000'000) throw UsageError("sweep: need a positive range and steps");
      for (std::uint64_t i = 0; i <= steps; ++i) {
        cost::AttackScenario p = s;
        const double t = top * static_cast<double>(i) / static_cast<double>(steps);
        p.attack_time = cost::from_seconds(t);
        sweep.emplace_back(t, cost::onspend_success(p));
      }
    }
  } else if (scenario.contains("sweep")) {
    throw UsageError("sweep: needs an attack section");
  }

  if (scenario.contains("multi_machine")) {
    const json& j = scenario.at("multi_machine");
    check_keys(j, {"machines", "total_point_additions", "partition_overhead"}, "multi_machine");
    std::uint64_t machines = 1, total = 208, overhead = cost::kDefaultPartitionOverhead;
    maybe(j, "machines", machines, "multi_machine");
    maybe(j, "total_point_additions", total, "multi_machine");
    maybe(j, "partition_overhead", overhead, "multi_machine");
    const auto partition = cost::overhead_partition(overhead);
    result["multi_machine"] = {{"machines", machines},
                               {"total_point_additions", total},
                               {"per_machine_additions", partition(machines, total)},
                               {"speedup", cost::multi_machine_speedup(machines, total, partition)}};
  }

  if (scenario.contains("salvage")) {
    const json& j = scenario.at("salvage");
    check_keys(j, {"per_key_time_s", "wallets"}, "salvage");
    std::optional<cost::Nanos> per_key = attack_time;
    if (j.contains("per_key_time_s")) per_key = cost::from_seconds(number(j, "per_key_time_s", "salvage"));
    if (!per_key) throw UsageError("salvage: per_key_time_s is required without an attack time");
    std::vector<cost::WalletRecord> wallets;
    if (j.contains("wallets")) {
      if (!j.at("wallets").is_array()) throw UsageError("salvage.wallets: expected an array");
      for (const json& w : j.at("wallets")) {
        check_keys(w, {"balance", "keys_required", "label"}, "salvage.wallets[]");
        cost::WalletRecord r;
        r.balance = number(w, "balance", "salvage.wallets[]");
        maybe(w, "keys_required", r.keys_required, "salvage.wallets[]");
        if (w.contains("label")) {
          if (!w.at("label").is_string()) throw UsageError("salvage.wallets[].label: expected a string");
          r.label = w.at("label").get<std::string>();
        }
        wallets.push_back(std::move(r));
      }
    }
    salvage_curve = cost::salvage_timeline(std::move(wallets), *per_key);
    json curve = json::array();
    for (const auto& p : salvage_curve) {
      curve.push_back({{"time_s", cost::to_seconds(p.time)}, {"cumulative_balance", p.cumulative_balance},
                       {"label", p.label}});
    }
    result["salvage"] = {{"per_key_time_s", cost::to_seconds(*per_key)},
                         {"curve", std::move(curve)},
                         {"total_time_s", salvage_curve.empty() ? 0.0 : cost::to_seconds(salvage_curve.back().time)},
                         {"total_balance", salvage_curve.empty() ? 0.0 : salvage_curve.back().cumulative_balance}};
  }
  return result;
}

}  // namespace

int run_estimate(const std::string& scenario_path, const std::string& output_path, const std::string& salvage_csv,
                 const std::string& sweep_csv, std::ostream& out) {
  json scenario;
  try {
    scenario = json::parse(read_file(scenario_path));
  } catch (const json::exception& e) {
    throw UsageError(scenario_path + ": " + e.what());
  }
  std::vector<cost::SalvagePoint> curve;
  std::vector<std::pair<double, double>> sweep;
  json result;
  try {
    result = evaluate(scenario, curve, sweep);
  } catch (const cost::CostError& e) {
    throw UsageError(scenario_path + ": " + e.what());
  } catch (const json::exception& e) {
    throw UsageError(scenario_path + ": " + e.what());
  }

  if (!salvage_csv.empty()) {
    if (!scenario.contains("salvage")) throw UsageError("--salvage-csv needs a salvage section");
    std::string csv = "time_s,cumulative_balance,label\n";
    for (const auto& p : curve) {
      csv += number_text(cost::to_seconds(p.time)) + "," + number_text(p.cumulative_balance) + "," +
             csv_field(p.label) + "\n";
    }
    write_file(salvage_csv, csv);
  }
  if (!sweep_csv.empty()) {
    if (!scenario.contains("sweep")) throw UsageError("--sweep-csv needs a sweep section");
    std::string csv = "attack_time_s,success_probability\n";
    for (const auto& [t, p] : sweep) csv += number_text(t) + "," + number_text(p) + "\n";
    write_file(sweep_csv, csv);
  }
  const std::string dumped = harness::canonical_dump(result);
  if (output_path.empty()) {
    out << dumped;
  } else {
    write_file(output_path, dumped);
  }
  return kOk;
}

}  // namespace kickmix::cli

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_tool(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kickmix::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("kickmix_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
};

json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("build writes the circuit and its sidecar") {
  Scratch s;
  auto r = run_tool({"build", "temp-and", "-o", s.path("t.kmx")});
  CHECK(r.code == 0);
  REQUIRE(fs::exists(s.path("t.kmx")));
  REQUIRE(fs::exists(s.path("t.kmx.json")));
  const json side = load(s.path("t.kmx.json"));
  CHECK(side["predicted"]["non_clifford"] == 1);
  CHECK(side["static"] == side["predicted"]);
  CHECK(r.out.find("non-Clifford 1") != std::string::npos);

  CHECK(run_tool({"build", "adder", "--width", "99", "-o", s.path("a.kmx")}).code == 2);
  CHECK(run_tool({"build", "mod-add", "--width", "4", "--constant", "3", "--modulus", "99", "-o", s.path("m.kmx")}).code ==
        2);
  CHECK(run_tool({"build", "lookup", "--table", "1,2,3", "-o", s.path("l.kmx")}).code == 2);
  CHECK(run_tool({"build", "lookup", "--table", "1,2,x,3", "-o", s.path("l.kmx")}).code == 2);
  CHECK(run_tool({"build", "pointadd", "--point", "1,1", "-o", s.path("p.kmx")}).code == 2);
  CHECK(run_tool({"build", "frobnicate", "-o", s.path("f.kmx")}).code == 2);
  CHECK(run_tool({"build", "temp-and"}).code == 2);
  CHECK(run_tool({}).code == 2);

  CHECK(run_tool({"build", "lookup", "--table", "3,0,7,1", "-o", s.path("l.kmx")}).code == 0);
  CHECK(load(s.path("l.kmx.json"))["construction"] == "lookup");
}

TEST_CASE("build then verify a point adder") {
  Scratch s;
  REQUIRE(run_tool({"build", "pointadd", "--curve", "toy-p11-b7", "--point", "G", "-o", s.path("pa.kmx")}).code == 0);
  const auto spec = s.write("spec.json", R"({"curve": "toy-p11-b7", "test_count": 200})");
  auto v = run_tool({"verify", s.path("pa.kmx"), "--spec", spec, "-o", s.path("report.json")});
  CHECK(v.code == 0);
  CHECK(v.out.find("verdict: pass") != std::string::npos);
  const json rep = load(s.path("report.json"));
  CHECK(rep["report"]["verdict"] == "pass");
  CHECK(rep["report"]["counts"]["tests"] == 200);

  // Without -o the report goes to stdout and the summary to stderr.
  auto piped = run_tool({"verify", s.path("pa.kmx"), "--spec", spec});
  CHECK(piped.code == 0);
  CHECK(json::parse(piped.out) == rep);
  CHECK(piped.err.find("verdict: pass") != std::string::npos);

  auto ex = run_tool({"verify", s.path("pa.kmx"), "--exhaustive", "-o", s.path("full.json")});
  CHECK(ex.code == 0);
  CHECK(load(s.path("full.json"))["report"]["counts"]["tests"] == 12);
}

TEST_CASE("mutated circuits fail verification") {
  Scratch s;
  int failed = 0;
  for (int seed = 1; seed <= 6; ++seed) {
    const auto file = s.path("m" + std::to_string(seed) + ".kmx");
    REQUIRE(run_tool({"build", "pointadd", "--point", "G", "--mutate", std::to_string(seed), "-o", file}).code == 0);
    CHECK(load(file + ".json").contains("mutation"));
    auto v = run_tool({"verify", file, "--exhaustive", "-o", s.path("r.json")});
    REQUIRE(v.code != 2);
    if (v.code == 1) {
      ++failed;
      CHECK(v.out.find("verdict: fail") != std::string::npos);
      CHECK(v.out.find("  test ") != std::string::npos);
      CHECK_FALSE(load(s.path("r.json"))["report"]["failures"].empty());
    }
  }
  CHECK(failed >= 3);
}

TEST_CASE("verify usage errors") {
  Scratch s;
  REQUIRE(run_tool({"build", "pointadd", "-o", s.path("pa.kmx")}).code == 0);
  CHECK(run_tool({"verify", s.path("pa.kmx"), "--spec", s.path("missing.json")}).code == 2);
  CHECK(run_tool({"verify", s.path("missing.kmx")}).code == 2);
  CHECK(run_tool({"verify", s.path("pa.kmx"), "--spec", s.write("bad.json", "{not json")}).code == 2);
  CHECK(run_tool({"verify", s.path("pa.kmx"), "--spec", s.write("extra.json", R"({"tests": 3})")}).code == 2);
  CHECK(run_tool({"verify", s.path("pa.kmx"), "--curve", "toy-p61-b7"}).code == 2);
  CHECK(run_tool({"verify", s.path("pa.kmx"), "--kernel", "neon"}).code == 2);
  auto mapping = run_tool({"verify", s.path("pa.kmx"), "--spec",
                          s.write("map.json", R"({"registers": {"acc_x": "x"}, "test_count": 4})")});
  CHECK(mapping.code == 2);
  CHECK(mapping.err.find("'x'") != std::string::npos);
  auto parse = run_tool({"verify", s.write("broken.kmx", "qubits 2\nCCX 0 1\n")});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("broken.kmx:2:") != std::string::npos);
}

TEST_CASE("verify is deterministic across job counts") {
  Scratch s;
  REQUIRE(run_tool({"build", "windowed", "--curve", "toy-p61-b7", "--window", "2", "-o", s.path("w.kmx")}).code == 0);
  const auto spec = s.write("spec.json", R"({"curve": "toy-p61-b7", "registers": {"window": "k"}, "test_count": 600})");
  REQUIRE(run_tool({"verify", s.path("w.kmx"), "-s", spec, "--jobs", "1", "-o", s.path("a.json")}).code == 0);
  REQUIRE(run_tool({"verify", s.path("w.kmx"), "-s", spec, "--jobs", "8", "-o", s.path("b.json")}).code == 0);
  CHECK(slurp(s.path("a.json")) == slurp(s.path("b.json")));
  CHECK(load(s.path("a.json"))["report_digest"] == load(s.path("b.json"))["report_digest"]);
}

TEST_CASE("estimate") {
  Scratch s;
  const auto sc = s.write("sc.json", R"({
    "point_add": {"pa_toffoli": 2.1e6, "pa_qubits": 1175, "n": 256, "w": 16},
    "toffoli": 70000000,
    "t_rate": 500000,
    "attack": {"attack_time_s": 540, "block_interval_s": 600},
    "multi_machine": {"machines": 11, "total_point_additions": 208},
    "salvage": {"per_key_time_s": 540, "wallets": [{"balance": 3, "label": "x"}, {"balance": 9, "label": "y"}]},
    "sweep": {"max_attack_time_s": 600, "steps": 10}})");
  auto r = run_tool({"estimate", sc, "-o", s.path("out.json"), "--salvage-csv", s.path("s.csv"), "--sweep-csv",
                    s.path("w.csv")});
  REQUIRE(r.code == 0);
  const json j = load(s.path("out.json"));
  CHECK(j["point_add"]["ecdlp_toffoli"] == 64'305'024);
  CHECK(j["point_add"]["ecdlp_qubits"] == 1191);
  CHECK(j["point_add"]["windowed_additions"] == 28);
  CHECK(j["runtime"]["full_s"] == 1050.0);
  CHECK(j["runtime"]["primed_s"] == 525.0);
  CHECK(j["t_factory"]["qubits"] == 25000.0);
  CHECK(j["onspend"]["success_probability"].get<double>() == doctest::Approx(0.4066).epsilon(1e-4));
  CHECK(j["multi_machine"]["speedup"] == 6.5);
  CHECK(j["salvage"]["curve"][0]["label"] == "y");
  CHECK(slurp(s.path("s.csv")) == "time_s,cumulative_balance,label\n540,9,y\n1080,12,x\n");
  const std::string sweep = slurp(s.path("w.csv"));
  CHECK(sweep.rfind("attack_time_s,success_probability\n0,1\n", 0) == 0);
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 12);

  auto opt = run_tool({"estimate", s.write("o.json", R"({"point_add": {"pa_toffoli": 2100000, "optimize_window": true}})")});
  REQUIRE(opt.code == 0);
  CHECK(json::parse(opt.out)["point_add"]["optimal_window"] == 16);

  auto empty = run_tool({"estimate", s.write("e.json", R"({"salvage": {"per_key_time_s": 540, "wallets": []}})")});
  CHECK(empty.code == 0);
  CHECK(json::parse(empty.out)["salvage"]["curve"].empty());

  CHECK(run_tool({"estimate", s.write("b1.json", R"({"unknown": 1})")}).code == 2);
  CHECK(run_tool({"estimate", s.write("b2.json", R"({"point_add": {"pa_toffoli": "many"}})")}).code == 2);
  CHECK(run_tool({"estimate", s.write("b3.json", R"({"point_add": {"n": 8, "w": 4}})")}).code == 2);
  CHECK(run_tool({"estimate", s.write("b4.json", R"({"machine": {"round_time_s": 0}})")}).code == 2);
  CHECK(run_tool({"estimate", s.write("b5.json", R"({"salvage": {"wallets": []}})")}).code == 2);
  CHECK(run_tool({"estimate", s.write("b6.json", "[")}).code == 2);
  CHECK(run_tool({"estimate", s.path("absent.json")}).code == 2);
}

TEST_CASE("inspect") {
  Scratch s;
  REQUIRE(run_tool({"build", "temp-and", "-o", s.path("t.kmx")}).code == 0);
  auto text = run_tool({"inspect", s.path("t.kmx")});
  CHECK(text.code == 0);
  CHECK(text.out.find("non-Clifford: 1") != std::string::npos);
  CHECK(text.out.find("in a 0..0") != std::string::npos);
  CHECK(text.out.find("meta construction temp_and") != std::string::npos);

  auto js = run_tool({"inspect", s.path("t.kmx"), "--json", "--histogram"});
  CHECK(js.code == 0);
  const json j = json::parse(js.out);
  CHECK(j["resources"]["non_clifford"] == 1);
  CHECK(j["resources"]["qubits"] == 3);
  CHECK(j["histogram"]["IF CZ"] == 1);
  CHECK(j["metadata"]["construction"] == "temp_and");

  auto hist = run_tool({"inspect", s.path("t.kmx"), "--histogram"});
  CHECK(hist.out.find("  CCX 1") != std::string::npos);

  auto bad = run_tool({"inspect", s.write("bad.kmx", "qubits 2\nX 0\nCX 0 9\n")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bad.kmx:3:6:") != std::string::npos);
  CHECK(bad.err.find("out of range") != std::string::npos);
}

TEST_CASE("help") {
  for (const char* sub : {"build", "verify", "estimate", "inspect"}) {
    auto h = run_tool({sub, "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("EXIT STATUS") != std::string::npos);
  }
  CHECK(run_tool({"--help"}).out.find("SUBCOMMAND") != std::string::npos);
  CHECK(run_tool({"verify", "--bogus-flag", "x.kmx"}).code == 2);
}

TEST_CASE("curve registry from the environment") {
  const char* path = std::getenv("KICKMIX_CURVES");
  if (path == nullptr) {
    MESSAGE("KICKMIX_CURVES unset; covered by the cli_curve_registry test");
    return;
  }
  Scratch s;
  REQUIRE(run_tool({"build", "pointadd", "--curve", "fixture-p23", "--point", "3G", "-o", s.path("c.kmx")}).code == 0);
  auto v = run_tool({"verify", s.path("c.kmx"), "--curve", "fixture-p23", "--exhaustive", "-o", s.path("r.json")});
  CHECK(v.code == 0);
  const json rep = load(s.path("r.json"));
  CHECK(rep["report"]["counts"]["tests"] == 28);
  CHECK(rep["report"]["base_point"] == "3,13");  // 3G, computed by hand
}

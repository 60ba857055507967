#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace kickho::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "kickho");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string data_section(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line, data;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') data += line + "\n";
  return data;
}

bool has_comment(const CsvFile& f, const std::string& text) {
  for (const auto& c : f.comments)
    if (c.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("heat writes one row per kick with a provenance header") {
    const auto path = oracle::temp_path("heat.csv");
    const auto r = invoke({"heat", "--K", "2.0", "--q", "6", "--eta", "0.464", "--kicks", "100",
                           "--initial", "vacuum", "--out", path});
    REQUIRE(r.code == kExitOk);
    const auto f = read_csv(path);
    CHECK(f.table.columns == std::vector<std::string>{"kick", "energy", "leakage"});
    CHECK(f.table.rows.size() == 101);
    CHECK(f.table.rows[0][1] == 0.5);
    for (const char* key : {"kickho 0.1.0", "command: heat", "K = 2.0", "q = 6", "eta = 0.464",
                            "N = ", "converged = true"}) {
      CHECK(has_comment(f, key));
    }
    for (const auto& row : f.table.rows) CHECK(row[2] < 1e-6);
    const auto meta = nlohmann::json::parse(slurp(path + ".json"));
    CHECK(meta.contains("config"));
  }

  TEST_CASE("invalid input exits with 1") {
    auto r = invoke({"heat", "--q", "2"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("q") != std::string::npos);
    CHECK(invoke({"heat", "--colour", "red"}).code == kExitConfig);
    CHECK(invoke({"heat", "--eta", "abc"}).code == kExitConfig);
    CHECK(invoke({"heat", "--eta", "-0.1"}).code == kExitConfig);
    CHECK(invoke({"nosuchcommand"}).code == kExitConfig);
    CHECK(invoke({"heat", "--config", oracle::temp_path("absent.cfg")}).code == kExitConfig);
  }

  TEST_CASE("a truncated basis fails with 2") {
    const auto r = invoke({"heat", "--basis", "24", "--kicks", "100", "--out",
                           oracle::temp_path("short.csv")});
    CHECK(r.code == kExitFailure);
  }

  TEST_CASE("config file values are overridden by flags") {
    const auto cfg = oracle::temp_path("run.cfg");
    std::ofstream(cfg) << "# heat settings\nkicks = 5\neta = 0.459\nbasis = 128\n";
    const auto path = oracle::temp_path("cfg.csv");
    REQUIRE(invoke({"heat", "--config", cfg, "--eta", "0.469", "--out", path}).code == kExitOk);
    const auto f = read_csv(path);
    CHECK(f.table.rows.size() == 6);
    CHECK(has_comment(f, "eta = 0.469"));
    CHECK(has_comment(f, "basis = 128"));

    std::ofstream(cfg) << "colour = red\n";
    CHECK(invoke({"heat", "--config", cfg}).code == kExitConfig);
  }

  TEST_CASE("identical configs give identical data") {
    const auto a = oracle::temp_path("det_a.csv");
    const auto b = oracle::temp_path("det_b.csv");
    REQUIRE(invoke({"heat", "--kicks", "20", "--basis", "256", "--out", a}).code == kExitOk);
    REQUIRE(invoke({"heat", "--kicks", "20", "--basis", "256", "--out", b}).code == kExitOk);
    CHECK(data_section(a) == data_section(b));

    REQUIRE(invoke({"classical", "--kicks", "10", "--ensemble", "500", "--seed", "3",
                    "--trajectory-kicks", "200", "--bins", "8", "--threads", "1", "--out", a})
                .code == kExitOk);
    REQUIRE(invoke({"classical", "--kicks", "10", "--ensemble", "500", "--seed", "3",
                    "--trajectory-kicks", "200", "--bins", "8", "--threads", "3", "--out", b})
                .code == kExitOk);
    CHECK(data_section(a) == data_section(b));
    CHECK(data_section(derived_path(a, "histogram")) == data_section(derived_path(b, "histogram")));
  }

  TEST_CASE("classical outputs") {
    const auto path = oracle::temp_path("classical.csv");
    REQUIRE(invoke({"classical", "--kicks", "10", "--ensemble", "200", "--seed", "9",
                    "--trajectory-kicks", "500", "--bins", "7", "--plot", "--out", path})
                .code == kExitOk);
    const auto curve = read_csv(path);
    CHECK(curve.table.rows.size() == 11);
    CHECK(has_comment(curve, "seed = 9"));
    const auto traj = read_csv(derived_path(path, "trajectory"));
    CHECK(traj.table.rows.size() == 501);
    const auto hist = read_csv(derived_path(path, "histogram"));
    CHECK(hist.table.columns == std::vector<std::string>{"v", "u", "count"});
    CHECK(hist.table.rows.size() == 49);
    double total = 0;
    for (const auto& row : hist.table.rows) total += row[2];
    CHECK(total <= 501);
    CHECK(std::filesystem::exists(path + ".gp"));
  }

  TEST_CASE("husimi grid output") {
    const auto path = oracle::temp_path("husimi.csv");
    REQUIRE(invoke({"husimi", "--state", "initial", "--initial", "displaced", "--x1", "1.2",
                    "--x2", "2.0", "--basis", "80", "--extent", "4", "--spacing", "0.5", "--out",
                    path})
                .code == kExitOk);
    const auto f = read_csv(path);
    CHECK(f.table.columns == std::vector<std::string>{"x1", "x2", "value"});
    CHECK(f.table.rows.size() == 17 * 17);
    for (const auto& row : f.table.rows) CHECK(row[2] >= 0.0);
  }

  TEST_CASE("etascan and sweep schemas") {
    const auto scan = oracle::temp_path("scan.csv");
    REQUIRE(invoke({"etascan", "--kicks", "5", "--basis", "128", "--eta-from", "0.46", "--eta-to",
                    "0.47", "--eta-step", "0.005", "--out", scan})
                .code == kExitOk);
    const auto f = read_csv(scan);
    CHECK(f.table.columns[0] == "eta");
    CHECK(f.table.columns[1] == "energy_after_5");
    CHECK(f.table.rows.size() == 3);

    const auto sweep = oracle::temp_path("sweep.csv");
    REQUIRE(invoke({"sweep", "--basis", "60", "--eta-from", "0.46", "--eta-to", "0.465",
                    "--eta-step", "0.0025", "--out", sweep})
                .code == kExitOk);
    const auto s = read_csv(sweep);
    CHECK(s.table.columns == std::vector<std::string>{"eta", "phase", "overlap", "branch"});
    CHECK(has_comment(s, "exp(+i phase)"));
  }

  TEST_CASE("thread count from the environment") {
    setenv("KICKHO_THREADS", "zero", 1);
    CHECK(invoke({"heat", "--kicks", "1", "--basis", "32", "--out",
                  oracle::temp_path("env.csv")})
              .code == kExitConfig);
    setenv("KICKHO_THREADS", "2", 1);
    CHECK(invoke({"heat", "--kicks", "1", "--basis", "32", "--out",
                  oracle::temp_path("env.csv")})
              .code == kExitOk);
    CHECK(has_comment(read_csv(oracle::temp_path("env.csv")), "threads = 2"));
    unsetenv("KICKHO_THREADS");
  }

  TEST_CASE("CSV values round trip bitwise") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    Table t{{"a", "b"}, {}};
    for (int i = 0; i < 500; ++i) t.rows.push_back({std::ldexp(mant(rng), expo(rng)), mant(rng)});
    t.rows.push_back({0.1, -0.0});
    t.rows.push_back({5e-324, 1.7976931348623157e308});
    const auto path = oracle::temp_path("roundtrip.csv");
    write_csv(path, {"test", "0.1.0", {{"K", "2"}}, {"note"}}, t);
    const auto back = read_csv(path);
    CHECK(back.table.columns == t.columns);
    REQUIRE(back.table.rows.size() == t.rows.size());
    bool same = true;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      for (std::size_t j = 0; j < 2; ++j)
        same = same && std::memcmp(&back.table.rows[i][j], &t.rows[i][j], sizeof(double)) == 0;
    CHECK(same);
    CHECK(has_comment(back, "K = 2"));
    CHECK(derived_path("x/run.csv", "grid") == "x/run_grid.csv");
    CHECK(derived_path("run", "grid") == "run_grid.csv");
  }

  TEST_CASE("flat config parsing") {
    std::istringstream in("# comment\n\n a = 1 \nb=two\n");
    const auto kv = parse_flat(in, "test");
    REQUIRE(kv.size() == 2);
    CHECK(kv[0] == std::pair<std::string, std::string>{"a", "1"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"b", "two"});
    std::istringstream bad("novalue\n");
    CHECK_THROWS_AS(parse_flat(bad, "test"), ConfigError);
    CHECK(parse_bool("x", "yes"));
    CHECK_FALSE(parse_bool("x", "false"));
    CHECK_THROWS_AS(parse_real("x", "1.0junk"), ConfigError);
    CHECK_THROWS_AS(parse_integer("x", "3.5"), ConfigError);
  }
}

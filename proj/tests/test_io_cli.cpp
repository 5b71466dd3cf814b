#include "sgmod/cli.hpp"
#include "sgmod/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace sgmod;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sgmod_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("double formatting round trips exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(std::isinf(parse_double("inf")));
  CHECK(std::isnan(parse_double("nan")));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(parse_double("1.5x"), IoError);
  CHECK_THROWS_AS(parse_double(""), IoError);
  CHECK(json_to_double(json_double(kInf)) == kInf);
  CHECK(json_double(kInf) == "inf");
}

TEST_CASE("density-evolution CSV round trip") {
  SystemParams p;
  p.theta = Snr(0.6);
  DeOptions o;
  o.max_iter = 3;
  const auto traj = run_de(p, Receiver::ModifiedSic, GridSpec{Model::Continuous, -1.0, 3.0, 0.05}, o);
  const auto table = parse_csv(to_csv(de_trajectory_table(traj)));
  REQUIRE(table.header == std::vector<std::string>{"iteration", "t", "x", "z"});
  REQUIRE(table.rows.size() == traj.profiles.size() * traj.profiles[0].z.size());
  std::size_t row = 0;
  bool saw_inf = false;
  for (const auto& prof : traj.profiles) {
    for (std::size_t i = 0; i < prof.z.size(); ++i, ++row) {
      const auto& r = table.rows[row];
      CHECK(std::stoi(r[0]) == prof.iteration);
      CHECK(parse_double(r[1]) == prof.grid.at(i));
      CHECK(parse_double(r[2]) == prof.x[i]);
      CHECK(parse_double(r[3]) == prof.z[i]);
      saw_inf = saw_inf || r[3] == "inf";
    }
  }
  CHECK(saw_inf);
  const auto summary = de_summary_json(traj);
  CHECK(summary["front"].size() == traj.front.size());
  CHECK(summary["speed"].size() == traj.speed.size());
}

TEST_CASE("curve CSV is sorted and round trips") {
  SweepSpec spec;
  spec.alphas = {100.0, 10.0};
  spec.s_values = {3.0, 0.5};
  const auto table = sweep_curves(spec);
  const auto text = to_csv(curve_table_csv(table));
  const auto parsed = parse_csv(text);
  CHECK(parsed.header == std::vector<std::string>{"receiver", "alpha", "s", "sigma2", "ebn0_db", "spectral_efficiency"});
  for (std::size_t i = 1; i < parsed.rows.size(); ++i) {
    const auto& a = parsed.rows[i - 1];
    const auto& b = parsed.rows[i];
    const auto ka = std::make_tuple(a[0], parse_double(a[1]), parse_double(a[4]));
    const auto kb = std::make_tuple(b[0], parse_double(b[1]), parse_double(b[4]));
    CHECK(ka <= kb);
  }
  const auto back = parse_curve_csv(text);
  REQUIRE(back.rows.size() == table.rows.size());
  for (const auto& r : back.rows) {
    bool found = false;
    for (const auto& o : table.rows) {
      if (o.receiver == r.receiver && o.alpha == r.alpha && o.s == r.s) {
        found = true;
        CHECK(o.spectral_efficiency.bits() == r.spectral_efficiency.bits());
        CHECK(std::abs(o.ebn0.ratio() - r.ebn0.ratio()) <= 1e-12 * o.ebn0.ratio());
      }
    }
    CHECK(found);
  }
  const auto j = curve_table_json(table);
  CHECK(j["rows"].size() == table.rows.size());
}

TEST_CASE("link-sim JSON echoes the config and every iteration") {
  LinkSimConfig c;
  c.n_dims = 20;
  c.m_substreams = 2;
  c.k_streams = 6;
  c.w = 1;
  c.l_bits = 9;
  c.slots = 4;
  c.iterations = 2;
  const auto r = run_link_sim(c);
  const auto j = link_sim_json(r);
  CHECK(j["config"]["n_dims"] == 20);
  CHECK(j["config"]["theta"] == "inf");
  REQUIRE(j["iterations"].size() == 3);
  CHECK(j["iterations"][1]["x_hat"].size() == 4);
  CHECK(json_to_double(j["iterations"][1]["x_hat"][2]) == r.x_hat[1][2]);
}

TEST_CASE("cli: usage and help") {
  const auto none = cli({});
  CHECK(none.code == kExitUsage);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"de", "--help"}).code == kExitOk);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({"de", "--no-such-flag"}).code == kExitUsage);
}

TEST_CASE("cli: invalid values name the offending key") {
  auto r = cli({"de", "--alpha", "-1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--alpha") != std::string::npos);
  r = cli({"de", "--mode", "sic"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--theta") != std::string::npos);
  r = cli({"linksim", "--l-bits", "7"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--l-bits") != std::string::npos);
  r = cli({"de", "--dt", "0.3"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--dt") != std::string::npos);
  r = cli({"capacity"});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("cli: de run writes trajectory and summary") {
  const auto dir = scratch_dir("de");
  const auto out = dir / "run.csv";
  const auto r = cli({"de", "--alpha", "1", "--sigma2", "1", "--mode", "sic", "--theta", "0.68", "--t-max", "6",
                      "--max-iter", "5", "-o", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("front=") != std::string::npos);
  const auto table = parse_csv(read_text_file(out));
  CHECK(table.header == std::vector<std::string>{"iteration", "t", "x", "z"});
  CHECK(fs::exists(dir / "run.summary.json"));
  const auto summary = nlohmann::json::parse(read_text_file(dir / "run.summary.json"));
  CHECK(summary["theta"].get<double>() == 0.68);
}

TEST_CASE("cli: config file supplies defaults, flags override, unknown keys fail") {
  const auto dir = scratch_dir("config");
  write_text_file(dir / "run.ini", "[sweep]\nalphas = 10,100\ns-points = 3\ns-max = 2\n");
  const auto out = dir / "sweep.csv";
  auto r = cli({"--config", (dir / "run.ini").string(), "sweep", "--s-max", "5", "-o", out.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_curve_csv(read_text_file(out)).rows;
  CHECK(rows.size() == 12);
  double s_max = 0.0;
  for (const auto& row : rows) s_max = std::max(s_max, row.s);
  CHECK(s_max == doctest::Approx(5.0));

  write_text_file(dir / "bad.ini", "[sweep]\nalphaz = 10\n");
  r = cli({"sweep", "--config", (dir / "bad.ini").string(), "-o", out.string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("alphaz") != std::string::npos);
}

TEST_CASE("cli: sweep example and runtime errors") {
  const auto dir = scratch_dir("sweep");
  auto r = cli({"sweep", "--alphas", "10,100,500", "--s-min", "0.1", "--s-max", "30", "-o", (dir / "f.csv").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_csv(read_text_file(dir / "f.csv")).rows.size() == 3 * 40 * 2);

  r = cli({"capacity", "--s", "1", "-o", "/proc/sgmod-no-such-dir/x.csv"});
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("error") != std::string::npos);

  r = cli({"capacity", "--alpha", "100", "--ebn0-db", "-5", "-o", (dir / "c.csv").string()});
  CHECK(r.code == kExitRuntime);
}

TEST_CASE("cli: output directory from the environment") {
  const auto dir = scratch_dir("env");
  ::setenv("SGMOD_OUTPUT_DIR", dir.c_str(), 1);
  const auto r = cli({"capacity", "--alpha", "100", "--ebn0-db", "4", "--format", "json"});
  ::unsetenv("SGMOD_OUTPUT_DIR");
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(read_text_file(dir / "capacity.json"));
  CHECK(j["ebn0_db"].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("cli: linksim JSON with DE comparison") {
  const auto dir = scratch_dir("linksim");
  const auto r = cli({"linksim", "--n-dims", "30", "--k-streams", "15", "--m-substreams", "4", "--w", "1", "--l-bits",
                      "30", "--slots", "5", "--iterations", "2", "--compare-seeds", "2", "--format", "json", "-o",
                      (dir / "ls.json").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("max_de_rel_error=") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(dir / "ls.json"));
  CHECK(j["config"]["k_streams"] == 15);
  CHECK(j["iterations"].size() == 3);
  CHECK(j["de_comparison"]["iterations"].size() == 3);
}

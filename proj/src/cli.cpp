#include "sgmod/cli.hpp"

#include "sgmod/core_math.hpp"
#include "sgmod/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace sgmod {
namespace {

// Raw option values as CLI11 fills them; converted into RunConfig afterwards.
struct DeFlags {
  double alpha = 1.0;
  double sigma2 = 1.0;
  int w = 1;
  std::string mode = "pic";
  std::string theta;
  double delta = 0.01;
  std::string model = "continuous";
  double t_min = -1.0;
  double t_max = 20.0;
  double dt = 1e-2;
  int max_iter = 50;
  double tolerance = 1e-12;
};

struct LinkFlags {
  LinkSimConfig cfg;
  std::string mode = "pic";
  std::string theta;
  int compare_seeds = 0;
};

struct SweepFlags {
  std::vector<double> alphas{10.0, 100.0, 500.0};
  double s_min = 0.1;
  double s_max = 30.0;
  int s_points = 40;
  std::vector<std::string> receivers{"modified-sic", "awgn-capacity"};
  double ts_dt = 1e-2;
  double ts_t_max = 20.0;
  int ts_max_iter = 200;
};

struct Flags {
  std::string out;
  std::string format = "csv";
  DeFlags de;
  DeFlags sic;
  LinkFlags link;
  CapacityQuery cap;
  SweepFlags sweep;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void add_de_options(CLI::App* sub, DeFlags& f, bool sic_command) {
  sub->add_option("--alpha", f.alpha, "System load K/N")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--sigma2", f.sigma2, "Noise power")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--w", f.w, "Coupling half-window (discrete model)")->check(CLI::PositiveNumber)->capture_default_str();
  if (!sic_command) {
    sub->add_option("--mode", f.mode, "Receiver: pic (two-stage) or sic (modified SIC)")
        ->check(CLI::IsMember({"pic", "sic"}))
        ->capture_default_str();
    sub->add_option("--theta", f.theta, "Code threshold (required with --mode sic; 'inf' allowed)");
  } else {
    sub->add_option("--theta", f.theta, "Code threshold; default derives it from --delta");
    sub->add_option("--delta", f.delta, "Target front speed used to derive the threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }
  sub->add_option("--model", f.model, "continuous or discrete")
      ->check(CLI::IsMember({"continuous", "discrete"}))
      ->capture_default_str();
  sub->add_option("--t-min", f.t_min, "Left end of the continuous grid")->capture_default_str();
  sub->add_option("--t-max", f.t_max, "Right end of the grid")->capture_default_str();
  sub->add_option("--dt", f.dt, "Continuous grid spacing")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--max-iter", f.max_iter, "Iteration cap")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--tolerance", f.tolerance, "Stop when the sup-norm change drops below this")
      ->capture_default_str();
}

Snr parse_theta(const std::string& text, const char* flag) {
  try {
    return Snr(parse_double(text));
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": expected a nonnegative number or 'inf', got '" + text + "'");
  }
}

Receiver receiver_of(const std::string& mode) { return mode == "sic" ? Receiver::ModifiedSic : Receiver::TwoStagePic; }

void fill_de(RunConfig& rc, const DeFlags& f, bool sic_command) {
  rc.system.alpha = f.alpha;
  rc.system.sigma2 = f.sigma2;
  rc.system.w = f.w;
  rc.receiver = sic_command ? Receiver::ModifiedSic : receiver_of(f.mode);
  if (!f.theta.empty()) {
    rc.system.theta = parse_theta(f.theta, "--theta");
  } else if (sic_command) {
    try {
      rc.system.theta = wave_threshold(f.alpha, f.sigma2, f.delta);
    } catch (const DomainError& e) {
      throw UsageError(std::string("--delta: ") + e.what());
    }
  } else if (rc.receiver == Receiver::ModifiedSic) {
    throw UsageError("--theta is required with --mode sic");
  } else {
    rc.system.theta = Snr::infinity();
  }
  rc.grid.model = f.model == "discrete" ? Model::Discrete : Model::Continuous;
  rc.grid.t_min = f.t_min;
  rc.grid.t_max = f.t_max;
  rc.grid.dt = f.dt;
  if (rc.grid.model == Model::Discrete) {
    if (f.t_max != std::floor(f.t_max)) throw UsageError("--t-max must be an integer for the discrete model");
    if (f.t_max <= f.w) throw UsageError("--t-max must exceed --w");
  } else {
    if (f.t_min > -0.5) throw UsageError("--t-min must be at most -0.5");
    if (f.t_max <= 0.5) throw UsageError("--t-max must exceed 0.5");
    const double per_half = 0.5 / f.dt;
    if (std::abs(per_half - std::round(per_half)) > 1e-9) throw UsageError("--dt must divide 0.5 exactly");
  }
  rc.de_options.max_iter = f.max_iter;
  rc.de_options.tolerance = f.tolerance;
}

void fill_link(RunConfig& rc, const LinkFlags& f) {
  rc.link = f.cfg;
  rc.link.receiver = receiver_of(f.mode);
  if (!f.theta.empty()) {
    rc.link.theta = parse_theta(f.theta, "--theta");
  } else if (rc.link.receiver == Receiver::ModifiedSic) {
    throw UsageError("--theta is required with --mode sic");
  }
  const int sections = 2 * f.cfg.w + 1;
  if (f.cfg.l_bits % sections != 0) throw UsageError("--l-bits must be a multiple of 2*w+1");
  if (f.cfg.k_streams % sections != 0) throw UsageError("--k-streams must be a multiple of 2*w+1");
  if (f.compare_seeds > 0 && f.cfg.slots <= f.cfg.w) throw UsageError("--slots must exceed --w when comparing");
  rc.compare_seeds = f.compare_seeds;
}

void fill_sweep(RunConfig& rc, const SweepFlags& f) {
  if (f.s_max < f.s_min) throw UsageError("--s-max must be at least --s-min");
  if (f.s_points < 1) throw UsageError("--s-points must be positive");
  rc.sweep.alphas = f.alphas;
  rc.sweep.s_values.clear();
  const double lo = std::log(f.s_min), hi = std::log(f.s_max);
  for (int i = 0; i < f.s_points; ++i) {
    const double frac = f.s_points == 1 ? 0.0 : static_cast<double>(i) / (f.s_points - 1);
    rc.sweep.s_values.push_back(std::exp(lo + frac * (hi - lo)));
  }
  rc.sweep.receivers.clear();
  for (const auto& name : f.receivers) {
    try {
      rc.sweep.receivers.push_back(curve_receiver_from_string(name));
    } catch (const ConfigError& e) {
      throw UsageError(std::string("--receivers: ") + e.what());
    }
  }
  rc.sweep.two_stage_grid = GridSpec{Model::Continuous, -1.0, f.ts_t_max, f.ts_dt};
  rc.sweep.two_stage_max_iter = f.ts_max_iter;
}

std::filesystem::path default_output(Command c, OutputFormat fmt) {
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv("SGMOD_OUTPUT_DIR"); env && *env) dir = env;
  return dir / (std::string(to_string(c)) + (fmt == OutputFormat::Json ? ".json" : ".csv"));
}

std::filesystem::path sibling(const std::filesystem::path& p, const std::string& suffix) {
  auto q = p;
  q.replace_extension();
  q += suffix;
  return q;
}

void run_density_evolution(const RunConfig& rc, std::ostream& out) {
  const auto traj = run_de(rc.system, rc.receiver, rc.grid, rc.de_options);
  if (rc.format == OutputFormat::Json) {
    write_text_file(rc.output, de_trajectory_json(traj).dump(1) + "\n");
  } else {
    write_text_file(rc.output, to_csv(de_trajectory_table(traj)));
    write_text_file(sibling(rc.output, ".summary.json"), de_summary_json(traj).dump(1) + "\n");
  }
  out << to_string(rc.command) << ": receiver=" << to_string(rc.receiver)
      << " theta=" << format_double(rc.system.theta.value()) << " iterations=" << traj.iterations
      << " front=" << format_double(traj.front.back()) << " speed=" << format_double(traj.speed.back())
      << " converged=" << (traj.converged ? "true" : "false") << "\n";
}

void run_link(const RunConfig& rc, std::ostream& out) {
  const auto result = run_link_sim(rc.link);
  std::optional<DeComparison> cmp;
  if (rc.compare_seeds > 0) cmp = compare_with_de(rc.link, rc.compare_seeds);

  if (rc.format == OutputFormat::Json) {
    auto j = link_sim_json(result);
    if (cmp) j["de_comparison"] = de_comparison_json(*cmp);
    write_text_file(rc.output, j.dump(1) + "\n");
  } else if (cmp) {
    write_text_file(rc.output, to_csv(de_comparison_table(*cmp)));
  } else {
    CsvTable t;
    t.header = {"iteration", "slot", "x_hat"};
    for (std::size_t i = 0; i < result.x_hat.size(); ++i) {
      for (std::size_t s = 0; s < result.x_hat[i].size(); ++s) {
        t.rows.push_back({std::to_string(i), std::to_string(s + 1), format_double(result.x_hat[i][s])});
      }
    }
    write_text_file(rc.output, to_csv(t));
  }

  std::size_t decoded = result.decoded.empty() ? 0 : result.decoded.back().size();
  out << "linksim: iterations=" << rc.link.iterations << " codewords=" << result.codewords.size()
      << " decoded=" << decoded << " mean_abs_error=" << format_double(result.mean_abs_error.back());
  if (cmp) {
    double worst = 0.0;
    for (std::size_t i = 1; i < cmp->max_rel_error.size(); ++i) worst = std::max(worst, cmp->max_rel_error[i]);
    out << " seeds=" << cmp->seeds << " max_de_rel_error=" << format_double(worst);
  }
  out << "\n";
}

void run_capacity(const RunConfig& rc, std::ostream& out) {
  const auto& q = rc.capacity;
  const double s = q.s ? *q.s : s_for_ebn0(q.alpha, EbN0::from_db(*q.ebn0_db));
  const double sigma2 = q.alpha / s;
  const EbN0 e = ebn0_of(q.alpha, s);
  const double eff = c_eff(q.alpha, s).bits();
  const double awgn = awgn_capacity_fixed_point(e).bits();
  const double theta = wave_threshold(q.alpha, sigma2, q.delta).value();
  const double rate = wave_rate(q.alpha, sigma2, q.delta).bits();

  const std::vector<std::pair<std::string, double>> fields{
      {"alpha", q.alpha},          {"s", s},
      {"sigma2", sigma2},          {"ebn0_db", e.db()},
      {"spectral_efficiency", eff}, {"limit_efficiency", limit_efficiency(s)},
      {"awgn_capacity", awgn},     {"delta", q.delta},
      {"threshold", theta},        {"threshold_rate", rate}};
  if (rc.format == OutputFormat::Json) {
    nlohmann::json j;
    for (const auto& [k, v] : fields) j[k] = json_double(v);
    write_text_file(rc.output, j.dump(1) + "\n");
  } else {
    CsvTable t;
    t.rows.emplace_back();
    for (const auto& [k, v] : fields) {
      t.header.push_back(k);
      t.rows.back().push_back(format_double(v));
    }
    write_text_file(rc.output, to_csv(t));
  }
  out << "capacity: alpha=" << format_double(q.alpha) << " s=" << format_double(s)
      << " ebn0_db=" << format_double(e.db()) << " spectral_efficiency=" << format_double(eff)
      << " awgn_capacity=" << format_double(awgn) << "\n";
}

void run_sweep(const RunConfig& rc, std::ostream& out) {
  const auto table = sweep_curves(rc.sweep);
  if (rc.format == OutputFormat::Json) {
    write_text_file(rc.output, curve_table_json(table).dump(1) + "\n");
  } else {
    write_text_file(rc.output, to_csv(curve_table_csv(table)));
  }
  double best = 0.0;
  for (const auto& r : table.rows) {
    if (r.receiver != CurveReceiver::AwgnCapacity) best = std::max(best, r.spectral_efficiency.bits());
  }
  out << "sweep: rows=" << table.rows.size() << " skipped=" << table.skipped
      << " max_spectral_efficiency=" << format_double(best) << "\n";
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::De: return "de";
    case Command::Sic: return "sic";
    case Command::LinkSim: return "linksim";
    case Command::Capacity: return "capacity";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

ParseResult parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Spatially coupled sparse-graph modulation: density evolution, capacity curves, link simulation",
               "sgmod"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI file with one [section] per command; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags f;
  app.add_option("--out,-o", f.out, "Output file (default <command>.<format> in $SGMOD_OUTPUT_DIR or .)");
  app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* de = app.add_subcommand("de", "Density evolution of the SINR profile");
  add_de_options(de, f.de, false);

  auto* sic = app.add_subcommand("sic", "Modified SIC density evolution at a threshold derived from the front speed");
  add_de_options(sic, f.sic, true);

  auto* link = app.add_subcommand("linksim", "Finite-size Monte Carlo link simulation");
  auto& lc = f.link.cfg;
  link->add_option("--n-dims", lc.n_dims, "N, signal dimensions")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--m-substreams", lc.m_substreams, "M, replicas per bit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  link->add_option("--k-streams", lc.k_streams, "K, data streams")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--w", lc.w, "Packets span 2W+1 slots")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--l-bits", lc.l_bits, "L, bits per packet")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--slots", lc.slots, "Observed slots")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--sigma2", lc.sigma2, "Noise power")->check(CLI::NonNegativeNumber)->capture_default_str();
  link->add_option("--power", lc.power, "Power per stream")->check(CLI::PositiveNumber)->capture_default_str();
  link->add_option("--seed", lc.seed, "Random seed")->capture_default_str();
  link->add_option("--iterations", lc.iterations, "Receiver iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  link->add_option("--mode", f.link.mode, "pic or sic")->check(CLI::IsMember({"pic", "sic"}))->capture_default_str();
  link->add_option("--theta", f.link.theta, "Decoding threshold (required with --mode sic)");
  link->add_option("--compare-seeds", f.link.compare_seeds, "Average this many seeds against density evolution")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* cap = app.add_subcommand("capacity", "Spectral efficiency and Eb/N0 at one operating point");
  cap->add_option("--alpha", f.cap.alpha, "System load")->check(CLI::PositiveNumber)->capture_default_str();
  auto* s_opt = cap->add_option("--s", f.cap.s, "Total SNR alpha/sigma2")->check(CLI::PositiveNumber);
  auto* e_opt = cap->add_option("--ebn0-db", f.cap.ebn0_db, "Target Eb/N0 in dB");
  s_opt->excludes(e_opt);
  cap->add_option("--delta", f.cap.delta, "Front speed for the threshold columns")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Spectral efficiency versus Eb/N0 curves");
  sw->add_option("--alphas", f.sweep.alphas, "Loads")->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  sw->add_option("--s-min", f.sweep.s_min, "Smallest total SNR")->check(CLI::PositiveNumber)->capture_default_str();
  sw->add_option("--s-max", f.sweep.s_max, "Largest total SNR")->check(CLI::PositiveNumber)->capture_default_str();
  sw->add_option("--s-points", f.sweep.s_points, "Log-spaced SNR points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sw->add_option("--receivers", f.sweep.receivers, "modified-sic, two-stage, awgn-capacity")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--two-stage-dt", f.sweep.ts_dt, "Grid spacing for two-stage rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sw->add_option("--two-stage-t-max", f.sweep.ts_t_max, "Grid length for two-stage rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sw->add_option("--two-stage-max-iter", f.sweep.ts_max_iter, "PIC iterations for two-stage rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ParseResult result;
  if (args.empty()) {
    result.exit_code = kExitUsage;
    result.message = app.help();
    return result;
  }

  std::vector<std::string> storage{"sgmod"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    result.message = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.message = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kExitUsage;
    result.message = std::string(e.what()) + "\nRun with --help for usage.";
    return result;
  }

  RunConfig rc;
  rc.format = f.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  try {
    if (de->parsed()) {
      rc.command = Command::De;
      fill_de(rc, f.de, false);
      rc.system.validate();
    } else if (sic->parsed()) {
      rc.command = Command::Sic;
      fill_de(rc, f.sic, true);
      rc.system.validate();
    } else if (link->parsed()) {
      rc.command = Command::LinkSim;
      fill_link(rc, f.link);
      rc.link.validate();
    } else if (cap->parsed()) {
      rc.command = Command::Capacity;
      if (!f.cap.s && !f.cap.ebn0_db) throw UsageError("capacity needs --s or --ebn0-db");
      rc.capacity = f.cap;
    } else {
      rc.command = Command::Sweep;
      fill_sweep(rc, f.sweep);
      rc.sweep.validate();
    }
  } catch (const std::invalid_argument& e) {
    // UsageError and ConfigError (module validation) both land here.
    result.exit_code = kExitUsage;
    result.message = std::string(to_string(rc.command)) + ": " + e.what();
    return result;
  }
  rc.output = f.out.empty() ? default_output(rc.command, rc.format) : std::filesystem::path(f.out);
  result.config = std::move(rc);
  return result;
}

void execute(const RunConfig& rc, std::ostream& out) {
  switch (rc.command) {
    case Command::De:
    case Command::Sic: run_density_evolution(rc, out); break;
    case Command::LinkSim: run_link(rc, out); break;
    case Command::Capacity: run_capacity(rc, out); break;
    case Command::Sweep: run_sweep(rc, out); break;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseResult parsed = parse_config(args);
  if (!parsed.config) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message << "\n";
    return parsed.exit_code;
  }
  try {
    execute(*parsed.config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace sgmod

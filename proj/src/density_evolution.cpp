#include "sgmod/density_evolution.hpp"

#include "sgmod/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgmod {
namespace {

constexpr double kGridEps = 1e-9;

// g over a whole profile; neighbouring equal z (the flat bulk) reuse the value.
std::vector<double> mse_profile(const std::vector<double>& z) {
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    g[i] = (i > 0 && z[i] == z[i - 1]) ? g[i - 1] : mse_g(z[i]);
  }
  return g;
}

// Number of grid steps in half a packet length; dt must divide 1/2.
std::size_t half_window(double dt) {
  const double h = 0.5 / dt;
  const double r = std::round(h);
  if (r < 1.0 || std::abs(h - r) > kGridEps * h) {
    throw ConfigError("continuous grid: dt must divide 1/2 exactly, got dt=" + std::to_string(dt));
  }
  return static_cast<std::size_t>(r);
}

void require_variance(const SinrProfile& p) {
  if (!p.has_variance()) throw InvariantError("SINR update requires a variance profile");
  for (double x : p.x) {
    if (!(x > 0.0)) throw InvariantError("nonpositive noise-and-interference variance");
  }
}

// Plain left-to-right sum. Floating-point addition is monotone, so a fixed
// summation order keeps the operator monotone in every term.
double window_sum(const std::vector<double>& v, std::size_t start, std::size_t count) {
  double acc = 0.0;
  for (std::size_t k = start; k < start + count; ++k) acc += v[k];
  return acc;
}

double sup_change(const std::vector<double>& a, const std::vector<double>& b) {
  double change = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool fa = std::isfinite(a[i]);
    const bool fb = std::isfinite(b[i]);
    if (fa != fb) return kInf;
    if (fa) change = std::max(change, std::abs(a[i] - b[i]));
  }
  return change;
}

}  // namespace

const char* to_string(Receiver r) {
  return r == Receiver::TwoStagePic ? "two-stage" : "modified-sic";
}

const char* to_string(Model m) { return m == Model::Discrete ? "discrete" : "continuous"; }

void SystemParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be positive");
  if (w < 1) throw ConfigError("w must be at least 1");
}

SinrProfile init_discrete(const SystemParams& params, int t_max) {
  params.validate();
  if (t_max <= params.w) throw ConfigError("init_discrete: t_max must exceed w");
  SinrProfile p;
  p.grid = Grid{Model::Discrete, 1.0, 1.0, static_cast<std::size_t>(t_max)};
  p.first_unknown = static_cast<std::size_t>(params.w);
  p.z.assign(p.grid.size, 0.0);
  std::fill(p.z.begin(), p.z.begin() + static_cast<std::ptrdiff_t>(p.first_unknown), kInf);
  return p;
}

SinrProfile init_continuous(const SystemParams& params, double t_min, double t_max, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("init_continuous: dt must be positive");
  if (!(t_min < 0.0 && t_max > 0.0)) throw ConfigError("init_continuous: need t_min < 0 < t_max");

  const double steps = (t_max - t_min) / dt;
  SinrProfile p;
  p.grid = Grid{Model::Continuous, t_min, dt,
                static_cast<std::size_t>(std::floor(steps + kGridEps)) + 1};

  // Index of the first grid point with t >= 0; a point at t = 0 is unknown.
  const double k0 = -t_min / dt;
  const double k0r = std::round(k0);
  p.first_unknown = static_cast<std::size_t>(std::abs(k0 - k0r) <= kGridEps * std::max(1.0, k0) ? k0r : std::ceil(k0));

  p.z.assign(p.grid.size, 0.0);
  std::fill(p.z.begin(), p.z.begin() + static_cast<std::ptrdiff_t>(p.first_unknown), kInf);
  return p;
}

SinrProfile init_profile(const SystemParams& params, const GridSpec& spec) {
  if (spec.model == Model::Discrete) {
    return init_discrete(params, static_cast<int>(std::lround(spec.t_max)));
  }
  return init_continuous(params, spec.t_min, spec.t_max, spec.dt);
}

SinrProfile variance_update_discrete(const SinrProfile& profile, const SystemParams& params) {
  const auto n = static_cast<std::ptrdiff_t>(profile.z.size());
  const int w = params.w;
  const auto g = mse_profile(profile.z);
  // Left of the grid every packet is known (g = 0); right of it none is (g = 1).
  const auto g_at = [&](std::ptrdiff_t k) { return k < 0 ? 0.0 : (k >= n ? 1.0 : g[static_cast<std::size_t>(k)]); };

  SinrProfile out = profile;
  out.x.resize(profile.z.size());
  const double scale = params.alpha / static_cast<double>(2 * w + 1);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -w; j <= w; ++j) acc += g_at(i + j);
    out.x[static_cast<std::size_t>(i)] = scale * acc + params.sigma2;
  }
  return out;
}

SinrProfile sinr_update_discrete(const SinrProfile& profile, const SystemParams& params) {
  require_variance(profile);
  const auto n = static_cast<std::ptrdiff_t>(profile.z.size());
  const int w = params.w;
  const double edge = params.alpha + params.sigma2;
  const auto inv_x = [&](std::ptrdiff_t k) {
    return 1.0 / (k >= n ? edge : profile.x[static_cast<std::size_t>(std::max<std::ptrdiff_t>(k, 0))]);
  };

  SinrProfile out = profile;
  out.x.clear();
  out.iteration = profile.iteration + 1;
  const double norm = 1.0 / static_cast<double>(2 * w + 1);
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(profile.first_unknown); i < n; ++i) {
    double acc = 0.0;
    for (int j = -w; j <= w; ++j) acc += inv_x(i + j);
    out.z[static_cast<std::size_t>(i)] = norm * acc;
  }
  return out;
}

// Trapezoid over the packet window, with one convention for the decoded
// boundary: on an interval whose left end is decoded (z = inf) and right end is
// not, the integrand is taken as 0 over the whole interval, i.e. a grid point
// stands for [t_k, t_k + dt) and the step sits exactly on the grid point. This
// reproduces x_0^t = alpha (t + 1/2) + sigma2 exactly for the step start.
// All other intervals use plain trapezoid with g(inf) = 0.
SinrProfile variance_update_continuous(const SinrProfile& profile, const SystemParams& params) {
  const std::size_t n = profile.z.size();
  const std::size_t h = half_window(profile.grid.dt);
  const double dt = profile.grid.dt;
  const auto g = mse_profile(profile.z);

  const auto z_at = [&](std::ptrdiff_t k) {
    return k < 0 ? kInf : (k >= static_cast<std::ptrdiff_t>(n) ? 0.0 : profile.z[static_cast<std::size_t>(k)]);
  };
  const auto g_at = [&](std::ptrdiff_t k) {
    return k < 0 ? 0.0 : (k >= static_cast<std::ptrdiff_t>(n) ? 1.0 : g[static_cast<std::size_t>(k)]);
  };

  // Interval k (between grid points k and k+1), stored at index k + h.
  std::vector<double> interval(n - 1 + 2 * h);
  for (std::size_t e = 0; e < interval.size(); ++e) {
    const auto k = static_cast<std::ptrdiff_t>(e) - static_cast<std::ptrdiff_t>(h);
    const double za = z_at(k);
    const double zb = z_at(k + 1);
    if (std::isinf(za)) {
      interval[e] = 0.0;
    } else if (std::isinf(zb)) {
      interval[e] = 0.5 * dt * g_at(k);
    } else {
      interval[e] = 0.5 * dt * (g_at(k) + g_at(k + 1));
    }
  }

  SinrProfile out = profile;
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.x[i] = params.alpha * window_sum(interval, i, 2 * h) + params.sigma2;
  }
  return out;
}

SinrProfile sinr_update_continuous(const SinrProfile& profile, const SystemParams& params) {
  require_variance(profile);
  const std::size_t n = profile.z.size();
  const std::size_t h = half_window(profile.grid.dt);
  const double dt = profile.grid.dt;
  const double edge = params.alpha + params.sigma2;

  const auto inv_x = [&](std::ptrdiff_t k) {
    if (k < 0) return 1.0 / params.sigma2;
    if (k >= static_cast<std::ptrdiff_t>(n)) return 1.0 / edge;
    return 1.0 / profile.x[static_cast<std::size_t>(k)];
  };

  std::vector<double> interval(n - 1 + 2 * h);
  for (std::size_t e = 0; e < interval.size(); ++e) {
    const auto k = static_cast<std::ptrdiff_t>(e) - static_cast<std::ptrdiff_t>(h);
    interval[e] = 0.5 * dt * (inv_x(k) + inv_x(k + 1));
  }

  SinrProfile out = profile;
  out.x.clear();
  out.iteration = profile.iteration + 1;
  for (std::size_t i = profile.first_unknown; i < n; ++i) {
    out.z[i] = window_sum(interval, i, 2 * h);
  }
  return out;
}

SinrProfile variance_update(const SinrProfile& profile, const SystemParams& params) {
  return profile.grid.model == Model::Discrete ? variance_update_discrete(profile, params)
                                               : variance_update_continuous(profile, params);
}

SinrProfile sinr_update(const SinrProfile& profile, const SystemParams& params) {
  return profile.grid.model == Model::Discrete ? sinr_update_discrete(profile, params)
                                               : sinr_update_continuous(profile, params);
}

SinrProfile sic_threshold_update(const SinrProfile& profile, Snr theta) {
  SinrProfile out = profile;
  const double th = theta.value();
  for (double& z : out.z) {
    if (z > th) z = kInf;
  }
  return out;
}

SinrProfile operator_F(const SinrProfile& profile, const SystemParams& params, Receiver receiver) {
  SinrProfile next = sinr_update(variance_update(profile, params), params);
  if (receiver == Receiver::ModifiedSic) next = sic_threshold_update(next, params.theta);
  return variance_update(next, params);
}

double front_position(const SinrProfile& profile, Snr theta) {
  const double limit = profile.grid.back() - 1.0 + kGridEps;
  const double th = theta.value();
  double front = -kInf;
  for (std::size_t i = 0; i < profile.z.size(); ++i) {
    const double t = profile.grid.at(i);
    if (t > limit || !(profile.z[i] >= th)) break;
    front = t;
  }
  return front;
}

DeTrajectory run_de(const SystemParams& params, Receiver receiver, const GridSpec& grid,
                    const DeOptions& options) {
  params.validate();
  if (options.max_iter < 1) throw ConfigError("run_de: max_iter must be at least 1");
  if (grid.model == Model::Continuous && grid.t_min > -0.5) {
    throw ConfigError("run_de: continuous grid must start at or before t = -1/2");
  }

  DeTrajectory traj;
  traj.receiver = receiver;
  traj.params = params;

  SinrProfile current = variance_update(init_profile(params, grid), params);
  const double lo = params.sigma2 * (1.0 - 1e-12);
  const double hi = (params.alpha + params.sigma2) * (1.0 + 1e-12);
  const double stall_speed = current.grid.dt / 10.0;

  traj.front.push_back(front_position(current, params.theta));
  traj.speed.push_back(0.0);
  traj.profiles.push_back(current);

  int slow_run = 0;
  for (int i = 1; i <= options.max_iter; ++i) {
    SinrProfile next = sinr_update(current, params);
    if (receiver == Receiver::ModifiedSic) next = sic_threshold_update(next, params.theta);
    next = variance_update(next, params);

    for (double x : next.x) {
      if (!(x >= lo && x <= hi)) {
        throw InvariantError("run_de: variance left [sigma2, alpha + sigma2] at iteration " + std::to_string(i));
      }
    }

    const double change = sup_change(current.z, next.z);
    const double front = front_position(next, params.theta);
    const double prev = traj.front.back();
    const double speed = std::isfinite(prev) && std::isfinite(front) ? front - prev : 0.0;
    traj.front.push_back(front);
    traj.speed.push_back(speed);

    slow_run = speed < stall_speed ? slow_run + 1 : 0;
    if (slow_run >= 5 && !traj.stalled_at) traj.stalled_at = i;

    current = std::move(next);
    traj.iterations = i;
    if (options.keep_profiles) traj.profiles.push_back(current);
    if (change < options.tolerance) {
      traj.converged = true;
      break;
    }
  }
  if (!options.keep_profiles) traj.profiles.push_back(current);
  return traj;
}

TwoStageResult two_stage_max_rate(const SystemParams& params, const GridSpec& grid, int max_iter) {
  SystemParams p = params;
  p.theta = Snr(0.0);
  DeOptions opts;
  opts.max_iter = max_iter;
  opts.keep_profiles = false;
  const DeTrajectory traj = run_de(p, Receiver::TwoStagePic, grid, opts);
  const SinrProfile& last = traj.final_profile();

  const std::size_t first = last.first_unknown;
  const std::size_t centre = first + (last.z.size() - 1 - first) / 2;
  const auto succeeds = [&](double theta) {
    for (std::size_t i = first; i <= centre; ++i) {
      if (!(last.z[i] > theta)) return false;
    }
    return true;
  };

  // Relative resolution: at large loads the threshold is O(1e-3).
  constexpr double kRelResolution = 1e-7;
  double lo = 0.0;
  double hi = 1.0 / params.sigma2 * (1.0 + kRelResolution);
  while (hi - lo > kRelResolution * hi) {
    const double mid = 0.5 * (lo + hi);
    if (succeeds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  TwoStageResult result;
  result.iterations = traj.iterations;
  if (lo > 0.0) {
    result.theta = Snr(lo);
    result.efficiency = CapacityValue(params.alpha * biawgn_capacity(lo));
  }
  return result;
}

double uncoupled_fixed_point(double alpha, double sigma2, int max_iter) {
  double z = 0.0;
  for (int i = 0; i < max_iter; ++i) {
    const double next = 1.0 / (alpha * mse_g(z) + sigma2);
    if (std::abs(next - z) < 1e-14) return next;
    z = next;
  }
  return z;
}

}  // namespace sgmod

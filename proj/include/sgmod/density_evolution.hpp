#pragma once

#include "sgmod/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sgmod {

enum class Receiver { TwoStagePic, ModifiedSic };
enum class Model { Discrete, Continuous };

const char* to_string(Receiver r);
const char* to_string(Model m);

/// Load, noise and code threshold shared by every analysis.
struct SystemParams {
  double alpha = 1.0;     // streams per signal dimension, K/N
  double sigma2 = 1.0;    // noise power
  int w = 1;              // coupling half-window (discrete model)
  Snr theta{0.0};         // code threshold

  void validate() const;
};

/// Uniform time grid. Discrete model: t = 1, 2, ..., spacing 1.
/// Continuous model: t = t_min + k dt.
struct Grid {
  Model model = Model::Continuous;
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t size = 0;

  double at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double back() const { return at(size - 1); }
};

/**
 * SINR profile t -> z with its companion variance profile t -> x.
 *
 * z holds +inf for known or decoded packets. x is empty until a variance
 * update has run on this z. `first_unknown` is the index of the first grid
 * point outside the always-known boundary region (t >= W+1 discrete, t >= 0
 * continuous); z left of it stays +inf forever.
 */
struct SinrProfile {
  Grid grid;
  std::vector<double> z;
  std::vector<double> x;
  std::size_t first_unknown = 0;
  int iteration = 0;

  bool has_variance() const { return x.size() == z.size() && !z.empty(); }
};

/// Grid specification for run_de. Discrete uses t_max; continuous uses all three.
struct GridSpec {
  Model model = Model::Continuous;
  double t_min = -1.0;
  double t_max = 40.0;
  double dt = 1e-3;
};

struct DeOptions {
  int max_iter = 50;
  double tolerance = 1e-12;     // sup-norm change over finite entries
  bool keep_profiles = true;    // false keeps only the initial and final profiles
};

/// Iteration history of one density-evolution run.
struct DeTrajectory {
  Receiver receiver = Receiver::ModifiedSic;
  SystemParams params;
  std::vector<SinrProfile> profiles;   // by iteration (or first/last only)
  std::vector<double> front;           // per iteration, -inf when nothing decoded
  std::vector<double> speed;           // front[i] - front[i-1], speed[0] = 0
  std::optional<int> stalled_at;       // iteration where stalling was detected
  bool converged = false;
  int iterations = 0;

  const SinrProfile& final_profile() const { return profiles.back(); }
};

// Initial profiles (z only, iteration 0).
SinrProfile init_discrete(const SystemParams& params, int t_max);
SinrProfile init_continuous(const SystemParams& params, double t_min, double t_max, double dt);
SinrProfile init_profile(const SystemParams& params, const GridSpec& spec);

/// x^t = alpha/(2W+1) sum_j g(z^{t+j}) + sigma2; z beyond the right edge is 0.
SinrProfile variance_update_discrete(const SinrProfile& profile, const SystemParams& params);

/// z^t = 1/(2W+1) sum_j 1/x^{t+j} for t >= W+1; x beyond the right edge is alpha + sigma2.
SinrProfile sinr_update_discrete(const SinrProfile& profile, const SystemParams& params);

/// x^t = alpha * int_{-1/2}^{1/2} g(z^{t+tau}) dtau + sigma2 (trapezoid, see source for the
/// decoded-boundary convention).
SinrProfile variance_update_continuous(const SinrProfile& profile, const SystemParams& params);

/// z^t = int_{-1/2}^{1/2} 1/x^{t+tau} dtau for t >= 0 (trapezoid).
SinrProfile sinr_update_continuous(const SinrProfile& profile, const SystemParams& params);

/// Dispatch on profile.grid.model.
SinrProfile variance_update(const SinrProfile& profile, const SystemParams& params);
SinrProfile sinr_update(const SinrProfile& profile, const SystemParams& params);

/// Points with z > theta (strict) become +inf; everything else is untouched.
SinrProfile sic_threshold_update(const SinrProfile& profile, Snr theta);

/// One full application of the SINR evolution operator F:
/// variance, SINR, and (modified SIC only) thresholding. The result carries
/// the variance of the new z.
SinrProfile operator_F(const SinrProfile& profile, const SystemParams& params, Receiver receiver);

/// Largest grid t (t <= t_max - 1) such that every grid point up to and
/// including t has z >= theta; -inf if the first point fails.
double front_position(const SinrProfile& profile, Snr theta);

DeTrajectory run_de(const SystemParams& params, Receiver receiver, const GridSpec& grid,
                    const DeOptions& options = {});

struct TwoStageResult {
  CapacityValue efficiency;
  Snr theta;
  int iterations = 0;
};

/**
 * Largest code threshold the two-stage receiver supports: PIC is run without
 * decoding, then theta is bisected (relative resolution 1e-7) for the largest value
 * with z_I^t > theta on the evaluation window [t_first_unknown, t_centre],
 * where t_centre is the midpoint of the unknown part of the grid.
 * Returns (alpha * C_BIAWGN(theta), theta), or (0, 0) if no theta > 0 works.
 */
TwoStageResult two_stage_max_rate(const SystemParams& params, const GridSpec& grid, int max_iter);

/// Bulk fixed point of the uncoupled recursion z <- 1/(alpha g(z) + sigma2), from z = 0.
double uncoupled_fixed_point(double alpha, double sigma2, int max_iter = 100000);

}  // namespace sgmod

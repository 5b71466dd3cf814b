#pragma once

#include "sgmod/density_evolution.hpp"
#include "sgmod/types.hpp"

#include <string>
#include <vector>

namespace sgmod {

/// Spectral efficiency of the modified SIC receiver in the coupled limit:
/// alpha * C_BIAWGN(ln(1 + s) / alpha), with s = alpha / sigma2.
CapacityValue c_eff(double alpha, double s);

/// Eb/N0 at which c_eff(alpha, s) is achieved: 1 / (2 C_BIAWGN(ln(1+s)/alpha) sigma2).
EbN0 ebn0_of(double alpha, double s);

/// Code threshold used in the achievability argument: first-iteration SINR at
/// the boundary minus the wave-speed penalty for advancing delta per iteration.
Snr wave_threshold(double alpha, double sigma2, double delta);

/// alpha * C_BIAWGN(wave_threshold(alpha, sigma2, delta)).
CapacityValue wave_rate(double alpha, double sigma2, double delta);

/// alpha -> infinity limits at fixed s.
double limit_efficiency(double s);  // 1/2 log2(1 + s)
double limit_ebn0(double s);        // s / log2(1 + s)

/// Total SNR s at which ebn0_of(alpha, s) equals the target (bisection in log s).
double s_for_ebn0(double alpha, EbN0 target);

enum class CurveReceiver { ModifiedSic, TwoStage, AwgnCapacity };
const char* to_string(CurveReceiver r);
CurveReceiver curve_receiver_from_string(const std::string& name);

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> s_values;
  std::vector<CurveReceiver> receivers{CurveReceiver::ModifiedSic, CurveReceiver::AwgnCapacity};
  // Density-evolution settings for two-stage rows.
  GridSpec two_stage_grid{Model::Continuous, -1.0, 20.0, 1e-2};
  int two_stage_max_iter = 200;

  void validate() const;
};

struct CurvePoint {
  CurveReceiver receiver;
  double alpha;
  double s;
  double sigma2;
  CapacityValue spectral_efficiency;
  EbN0 ebn0;
};

struct CurveTable {
  std::vector<CurvePoint> rows;
  int skipped = 0;  // two-stage points where no positive threshold was reachable
};

/**
 * Rows behind the spectral-efficiency vs Eb/N0 plot. For each (alpha, s):
 *  - modified-SIC: c_eff / ebn0_of;
 *  - awgn-capacity: awgn_capacity_fixed_point at the modified-SIC row's Eb/N0;
 *  - two-stage: two_stage_max_rate at sigma2 = alpha / s, Eb/N0 = 1/(2 C(theta) sigma2).
 * Rows are computed in parallel and returned sorted by Eb/N0 (dB), ties by
 * receiver then alpha.
 */
CurveTable sweep_curves(const SweepSpec& spec);

}  // namespace sgmod

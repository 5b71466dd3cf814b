#include "sgmod/capacity_analysis.hpp"

#include "sgmod/core_math.hpp"
#include "sgmod/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <tuple>

namespace sgmod {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

}  // namespace

CapacityValue c_eff(double alpha, double s) {
  require_positive(alpha, "alpha");
  require_positive(s, "s");
  return CapacityValue(alpha * biawgn_capacity(std::log1p(s) / alpha));
}

EbN0 ebn0_of(double alpha, double s) {
  require_positive(alpha, "alpha");
  require_positive(s, "s");
  const double rate = biawgn_capacity(std::log1p(s) / alpha);
  if (!(rate > 0.0)) throw DomainError("ebn0_of: per-stream rate underflowed to zero");
  return EbN0(s / (2.0 * alpha * rate));
}

Snr wave_threshold(double alpha, double sigma2, double delta) {
  require_positive(alpha, "alpha");
  require_positive(sigma2, "sigma2");
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  const double z_boundary = std::log((alpha + sigma2) / sigma2) / alpha;
  const double slope = alpha / (sigma2 * (alpha + sigma2));
  const double theta = z_boundary - slope * delta;
  if (!(theta > 0.0)) throw DomainError("wave_threshold: delta too large, threshold is not positive");
  return Snr(theta);
}

CapacityValue wave_rate(double alpha, double sigma2, double delta) {
  return CapacityValue(alpha * biawgn_capacity(wave_threshold(alpha, sigma2, delta).value()));
}

double limit_efficiency(double s) { return 0.5 * std::log2(1.0 + s); }

double limit_ebn0(double s) { return s / std::log2(1.0 + s); }

double s_for_ebn0(double alpha, EbN0 target) {
  require_positive(alpha, "alpha");
  double lo = -8.0, hi = 12.0;  // log10 s
  if (ebn0_of(alpha, std::pow(10.0, lo)).ratio() > target.ratio()) {
    throw DomainError("s_for_ebn0: target Eb/N0 below what this load can reach");
  }
  if (ebn0_of(alpha, std::pow(10.0, hi)).ratio() < target.ratio()) {
    throw DomainError("s_for_ebn0: target Eb/N0 too large");
  }
  const double e = target.ratio();
  const double log_s = bisect_boundary(lo, hi, 1e-13, [&](double ls) {
    return ebn0_of(alpha, std::pow(10.0, ls)).ratio() < e;
  });
  return std::pow(10.0, log_s);
}

const char* to_string(CurveReceiver r) {
  switch (r) {
    case CurveReceiver::ModifiedSic: return "modified-sic";
    case CurveReceiver::TwoStage: return "two-stage";
    case CurveReceiver::AwgnCapacity: return "awgn-capacity";
  }
  return "?";
}

CurveReceiver curve_receiver_from_string(const std::string& name) {
  if (name == "modified-sic" || name == "sic") return CurveReceiver::ModifiedSic;
  if (name == "two-stage" || name == "pic") return CurveReceiver::TwoStage;
  if (name == "awgn-capacity" || name == "awgn") return CurveReceiver::AwgnCapacity;
  throw ConfigError("unknown receiver '" + name + "'");
}

void SweepSpec::validate() const {
  if (alphas.empty()) throw ConfigError("sweep: alpha list is empty");
  if (s_values.empty()) throw ConfigError("sweep: s list is empty");
  if (receivers.empty()) throw ConfigError("sweep: receiver list is empty");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("sweep: alpha values must be positive");
  }
  for (double s : s_values) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("sweep: s values must be positive");
  }
}

CurveTable sweep_curves(const SweepSpec& spec) {
  spec.validate();

  struct Task {
    CurveReceiver receiver;
    double alpha;
    double s;
  };
  std::vector<Task> tasks;
  for (auto r : spec.receivers) {
    for (double a : spec.alphas) {
      for (double s : spec.s_values) tasks.push_back({r, a, s});
    }
  }

  std::vector<std::optional<CurvePoint>> slots(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    const double sigma2 = t.alpha / t.s;
    switch (t.receiver) {
      case CurveReceiver::ModifiedSic:
        slots[i] = CurvePoint{t.receiver, t.alpha, t.s, sigma2, c_eff(t.alpha, t.s), ebn0_of(t.alpha, t.s)};
        break;
      case CurveReceiver::AwgnCapacity: {
        const EbN0 e = ebn0_of(t.alpha, t.s);
        slots[i] = CurvePoint{t.receiver, t.alpha, t.s, sigma2, awgn_capacity_fixed_point(e), e};
        break;
      }
      case CurveReceiver::TwoStage: {
        SystemParams p;
        p.alpha = t.alpha;
        p.sigma2 = sigma2;
        const auto r = two_stage_max_rate(p, spec.two_stage_grid, spec.two_stage_max_iter);
        if (r.efficiency.bits() > 0.0) {
          const double rate = r.efficiency.bits() / t.alpha;
          slots[i] = CurvePoint{t.receiver, t.alpha, t.s, sigma2, r.efficiency, EbN0(1.0 / (2.0 * rate * sigma2))};
        }
        break;
      }
    }
  });

  CurveTable table;
  for (auto& slot : slots) {
    if (slot) {
      table.rows.push_back(*slot);
    } else {
      ++table.skipped;
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return std::make_tuple(a.ebn0.db(), static_cast<int>(a.receiver), a.alpha) <
           std::make_tuple(b.ebn0.db(), static_cast<int>(b.receiver), b.alpha);
  });
  return table;
}

}  // namespace sgmod

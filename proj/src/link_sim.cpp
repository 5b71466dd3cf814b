#include "sgmod/link_sim.hpp"

#include "sgmod/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace sgmod {
namespace {

constexpr double kMinVariance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("link sim: " + what);
}

std::size_t replica_row(const LinkSimConfig& cfg, int stream, int m) {
  return static_cast<std::size_t>(stream) * static_cast<std::size_t>(cfg.m_substreams) + static_cast<std::size_t>(m);
}

// Replica amplitudes for one slot, (K M) x L/(2W+1). `value(c, m, l)` gives
// the symbol (true bit or estimate) carried by replica m of bit l of codeword c.
template <class Value>
Eigen::MatrixXd replica_matrix(const LinkSimState& st, int slot, Value&& value) {
  const auto& cfg = st.config;
  const int ls = cfg.symbols_per_slot();
  const int m_count = cfg.m_substreams;
  const double amp = std::sqrt(cfg.power / m_count);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.k_streams) * m_count, ls);
  const auto& row_active = st.active[static_cast<std::size_t>(slot - 1)];
  for (int k = 0; k < cfg.k_streams; ++k) {
    const int c = row_active[static_cast<std::size_t>(k)];
    if (c < 0) continue;
    const int section = slot - st.codewords[static_cast<std::size_t>(c)].start_slot;
    for (int m = 0; m < m_count; ++m) {
      const std::size_t row = replica_row(cfg, k, m);
      const std::size_t base = row * static_cast<std::size_t>(cfg.l_bits);
      for (int r = 0; r < ls; ++r) {
        const int l = st.bit_at[base + static_cast<std::size_t>(section * ls + r)];
        a(static_cast<Eigen::Index>(row), r) = amp * value(c, m, l);
      }
    }
  }
  return a;
}

}  // namespace

void LinkSimConfig::validate() const {
  require(n_dims >= 1, "n_dims must be positive");
  require(m_substreams >= 1, "m_substreams must be positive");
  require(k_streams >= 1, "k_streams must be positive");
  require(w >= 1, "w must be at least 1");
  require(l_bits >= 1 && l_bits % sections() == 0, "l_bits must be a positive multiple of 2W+1");
  require(k_streams % sections() == 0, "k_streams must be a multiple of 2W+1");
  require(slots >= 1, "slots must be positive");
  require(sigma2 >= 0.0 && std::isfinite(sigma2), "sigma2 must be nonnegative");
  require(power > 0.0 && std::isfinite(power), "power must be positive");
  require(iterations >= 0, "iterations must be nonnegative");
}

int LinkSimState::slot_of(int codeword, int m, int bit) const {
  const auto& cw = codewords[static_cast<std::size_t>(codeword)];
  const std::size_t idx = replica_row(config, cw.stream, m) * static_cast<std::size_t>(config.l_bits) +
                          static_cast<std::size_t>(bit);
  return cw.start_slot + position[idx] / config.symbols_per_slot();
}

int LinkSimState::symbol_of(int codeword, int m, int bit) const {
  const auto& cw = codewords[static_cast<std::size_t>(codeword)];
  const std::size_t idx = replica_row(config, cw.stream, m) * static_cast<std::size_t>(config.l_bits) +
                          static_cast<std::size_t>(bit);
  return position[idx] % config.symbols_per_slot();
}

LinkSimState generate_world(const LinkSimConfig& config) {
  config.validate();
  LinkSimState st;
  st.config = config;
  const int n = config.n_dims;
  const int m_count = config.m_substreams;
  const int k_count = config.k_streams;
  const int l_bits = config.l_bits;
  const int sections = config.sections();
  const int ls = config.symbols_per_slot();
  const int slots = config.slots;

  std::mt19937_64 rng(config.seed);

  // Signatures: iid +-1/sqrt(N).
  const double chip = 1.0 / std::sqrt(static_cast<double>(n));
  st.signatures.resize(n, static_cast<Eigen::Index>(k_count) * m_count);
  for (Eigen::Index col = 0; col < st.signatures.cols(); ++col) {
    for (Eigen::Index i = 0; i < n; ++i) st.signatures(i, col) = (rng() >> 63) ? chip : -chip;
  }

  // Interleavers: replica m of bit l goes to section (l + m) mod (2W+1), at a
  // uniformly random position inside that section.
  const std::size_t rows = static_cast<std::size_t>(k_count) * static_cast<std::size_t>(m_count);
  st.position.resize(rows * static_cast<std::size_t>(l_bits));
  st.bit_at.resize(rows * static_cast<std::size_t>(l_bits));
  std::vector<std::int32_t> slots_in_section(static_cast<std::size_t>(ls));
  for (std::size_t row = 0; row < rows; ++row) {
    const int m = static_cast<int>(row % static_cast<std::size_t>(m_count));
    const std::size_t base = row * static_cast<std::size_t>(l_bits);
    for (int j = 0; j < sections; ++j) {
      std::iota(slots_in_section.begin(), slots_in_section.end(), 0);
      std::shuffle(slots_in_section.begin(), slots_in_section.end(), rng);
      int next = 0;
      for (int l = 0; l < l_bits; ++l) {
        if ((l + m) % sections != j) continue;
        const int p = j * ls + slots_in_section[static_cast<std::size_t>(next++)];
        st.position[base + static_cast<std::size_t>(l)] = p;
        st.bit_at[base + static_cast<std::size_t>(p)] = l;
      }
    }
  }

  // Staggered packets: user u = (s - 1) mod (2W+1) starts a packet at slot s.
  const int per_user = config.streams_per_user();
  st.active.assign(static_cast<std::size_t>(slots), std::vector<int>(static_cast<std::size_t>(k_count), -1));
  for (int s = 1; s <= slots; ++s) {
    const int user = (s - 1) % sections;
    for (int k = user * per_user; k < (user + 1) * per_user; ++k) {
      const int id = static_cast<int>(st.codewords.size());
      st.codewords.push_back({k, s, s + config.w});
      for (int t = s; t < s + sections && t <= slots; ++t) {
        st.active[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(k)] = id;
      }
    }
  }

  // Data: logical 0 -> +1, 1 -> -1.
  st.bits.resize(st.codewords.size());
  for (auto& b : st.bits) {
    b.resize(static_cast<std::size_t>(l_bits));
    for (auto& v : b) v = (rng() >> 63) ? -1.0 : 1.0;
  }

  std::normal_distribution<double> noise(0.0, std::sqrt(config.sigma2));
  st.received.reserve(static_cast<std::size_t>(slots));
  for (int t = 1; t <= slots; ++t) {
    Eigen::MatrixXd y = modulate_slot(st, t);
    if (config.sigma2 > 0.0) {
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        for (Eigen::Index r = 0; r < y.rows(); ++r) y(r, c) += noise(rng);
      }
    }
    st.received.push_back(std::move(y));
  }

  st.estimate.assign(st.codewords.size(), std::vector<double>(static_cast<std::size_t>(m_count * l_bits), 0.0));
  st.sinr.assign(st.codewords.size(), 0.0);
  st.decoded.assign(st.codewords.size(), false);
  st.sinr_history.push_back(st.sinr);
  st.mean_abs_error.push_back(1.0);
  refresh_residual(st);
  return st;
}

Eigen::MatrixXd modulate_slot(const LinkSimState& state, int slot) {
  if (slot < 1 || slot > state.config.slots) throw ConfigError("modulate_slot: slot out of range");
  const auto a = replica_matrix(state, slot, [&](int c, int, int l) {
    return state.bits[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)];
  });
  return state.signatures * a;
}

double matched_filter(const LinkSimState& state, int codeword, int m, int bit) {
  const int slot = state.slot_of(codeword, m, bit);
  if (slot > state.config.slots) return std::numeric_limits<double>::quiet_NaN();
  const auto& cw = state.codewords[static_cast<std::size_t>(codeword)];
  const auto row = static_cast<Eigen::Index>(replica_row(state.config, cw.stream, m));
  const double own = state.estimate[static_cast<std::size_t>(codeword)]
                                   [static_cast<std::size_t>(m * state.config.l_bits + bit)];
  return state.filtered[static_cast<std::size_t>(slot - 1)](row, state.symbol_of(codeword, m, bit)) +
         own / std::sqrt(static_cast<double>(state.config.m_substreams));
}

std::vector<double> combining_weights(std::span<const double> variances) {
  std::vector<double> xi(variances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    xi[i] = 1.0 / std::max(variances[i], kMinVariance);
    total += xi[i];
  }
  for (double& v : xi) v /= total;
  return xi;
}

namespace {

// Per-replica LLR contributions q_m / (sqrt(M) x_m); 0 for unobserved replicas.
void replica_terms(const LinkSimState& st, int c, int l, std::vector<double>& terms) {
  const int m_count = st.config.m_substreams;
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m_count));
  terms.assign(static_cast<std::size_t>(m_count), 0.0);
  for (int m = 0; m < m_count; ++m) {
    const int slot = st.slot_of(c, m, l);
    if (slot > st.config.slots) continue;
    const double x = std::max(st.x_hat[static_cast<std::size_t>(slot - 1)], kMinVariance);
    terms[static_cast<std::size_t>(m)] = matched_filter(st, c, m, l) * inv_sqrt_m / x;
  }
}

}  // namespace

double combined_llr(const LinkSimState& state, int codeword, int bit, std::optional<int> exclude) {
  std::vector<double> terms;
  replica_terms(state, codeword, bit, terms);
  double total = 0.0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    if (exclude && static_cast<int>(m) == *exclude) continue;
    total += terms[m];
  }
  return total;
}

double combine_and_estimate(const LinkSimState& state, int codeword, int bit, std::optional<int> exclude) {
  return std::tanh(combined_llr(state, codeword, bit, exclude));
}

void estimate_bits(LinkSimState& st) {
  const int l_bits = st.config.l_bits;
  const int m_count = st.config.m_substreams;
  std::vector<double> next_sinr(st.codewords.size());
  std::vector<std::vector<double>> next = st.estimate;
  std::vector<double> terms;
  double abs_error = 0.0;

  for (std::size_t c = 0; c < st.codewords.size(); ++c) {
    const auto& truth = st.bits[c];
    if (st.decoded[c]) {
      next_sinr[c] = kInf;
      continue;
    }
    double sum = 0.0, sum_sq = 0.0;
    for (int l = 0; l < l_bits; ++l) {
      replica_terms(st, static_cast<int>(c), l, terms);
      const double llr = std::accumulate(terms.begin(), terms.end(), 0.0);
      for (int m = 0; m < m_count; ++m) {
        next[c][static_cast<std::size_t>(m * l_bits + l)] = std::tanh(llr - terms[static_cast<std::size_t>(m)]);
      }
      const double signed_llr = truth[static_cast<std::size_t>(l)] * llr;
      sum += signed_llr;
      sum_sq += signed_llr * signed_llr;
      abs_error += std::abs(std::tanh(llr) - truth[static_cast<std::size_t>(l)]);
    }
    const double mean = sum / l_bits;
    const double var = l_bits > 1 ? (sum_sq - l_bits * mean * mean) / (l_bits - 1) : 0.0;
    next_sinr[c] = var > 0.0 ? mean * mean / var : kInf;
  }

  st.estimate = std::move(next);
  st.sinr = std::move(next_sinr);
  ++st.iteration;
  st.sinr_history.push_back(st.sinr);
  st.mean_abs_error.push_back(abs_error / (static_cast<double>(st.codewords.size()) * l_bits));
}

void refresh_residual(LinkSimState& st) {
  const auto& cfg = st.config;
  const double inv_sqrt_p = 1.0 / std::sqrt(cfg.power);
  const double dims = static_cast<double>(cfg.n_dims) * cfg.symbols_per_slot();
  st.residual.resize(static_cast<std::size_t>(cfg.slots));
  st.filtered.resize(static_cast<std::size_t>(cfg.slots));
  st.x_hat.resize(static_cast<std::size_t>(cfg.slots));

  for (int t = 1; t <= cfg.slots; ++t) {
    const auto idx = static_cast<std::size_t>(t - 1);
    const auto a = replica_matrix(st, t, [&](int c, int m, int l) {
      return st.estimate[static_cast<std::size_t>(c)][static_cast<std::size_t>(m * cfg.l_bits + l)];
    });
    st.residual[idx].noalias() = st.received[idx] - st.signatures * a;
    st.x_hat[idx] = st.residual[idx].squaredNorm() / (dims * cfg.power);
    st.filtered[idx].noalias() = st.signatures.transpose() * st.residual[idx];
    st.filtered[idx] *= inv_sqrt_p;
  }

  st.x_hat_history.push_back(st.x_hat);
  std::vector<int> ids;
  for (std::size_t c = 0; c < st.decoded.size(); ++c) {
    if (st.decoded[c]) ids.push_back(static_cast<int>(c));
  }
  st.decoded_history.push_back(std::move(ids));
}

void pic_iteration(LinkSimState& state) {
  estimate_bits(state);
  refresh_residual(state);
}

void sic_decode_step(LinkSimState& st, Snr theta) {
  const int m_count = st.config.m_substreams;
  const int l_bits = st.config.l_bits;
  for (std::size_t c = 0; c < st.codewords.size(); ++c) {
    if (st.decoded[c] || !(st.sinr[c] > theta.value())) continue;
    st.decoded[c] = true;
    for (int m = 0; m < m_count; ++m) {
      for (int l = 0; l < l_bits; ++l) {
        st.estimate[c][static_cast<std::size_t>(m * l_bits + l)] = st.bits[c][static_cast<std::size_t>(l)];
      }
    }
  }
  refresh_residual(st);
}

LinkSimResult run_link_sim(const LinkSimConfig& config) {
  LinkSimState st = generate_world(config);
  for (int i = 1; i <= config.iterations; ++i) {
    estimate_bits(st);
    if (config.receiver == Receiver::ModifiedSic) {
      sic_decode_step(st, config.theta);
    } else {
      refresh_residual(st);
    }
  }
  LinkSimResult r;
  r.config = config;
  r.x_hat = std::move(st.x_hat_history);
  r.sinr = std::move(st.sinr_history);
  r.decoded = std::move(st.decoded_history);
  r.codewords = std::move(st.codewords);
  r.mean_abs_error = std::move(st.mean_abs_error);
  return r;
}

DeComparison compare_with_de(const LinkSimConfig& config, int n_seeds) {
  config.validate();
  if (n_seeds < 1) throw ConfigError("compare_with_de: need at least one seed");
  if (config.slots <= config.w) throw ConfigError("compare_with_de: slots must exceed w");

  std::vector<std::vector<std::vector<double>>> runs(static_cast<std::size_t>(n_seeds));
  parallel_for(runs.size(), [&](std::size_t i) {
    LinkSimConfig c = config;
    c.seed = config.seed + i;
    runs[i] = run_link_sim(c).x_hat;
  });

  SystemParams p;
  p.alpha = config.load();
  p.sigma2 = config.sigma2;
  p.w = config.w;
  p.theta = config.receiver == Receiver::ModifiedSic ? config.theta : Snr::infinity();
  GridSpec g;
  g.model = Model::Discrete;
  g.t_max = config.slots;
  DeOptions opts;
  opts.max_iter = std::max(1, config.iterations);
  opts.tolerance = -1.0;
  const auto traj = run_de(p, config.receiver, g, opts);

  DeComparison out;
  out.seeds = n_seeds;
  const std::size_t iters = static_cast<std::size_t>(config.iterations) + 1;
  const std::size_t slots = static_cast<std::size_t>(config.slots);
  for (std::size_t i = 0; i < iters; ++i) {
    out.de_x.push_back(traj.profiles[i].x);
    std::vector<double> mean(slots, 0.0);
    for (const auto& run : runs) {
      for (std::size_t t = 0; t < slots; ++t) mean[t] += run[i][t] / n_seeds;
    }
    double worst = 0.0;
    for (std::size_t t = 0; t < slots; ++t) {
      worst = std::max(worst, std::abs(mean[t] - out.de_x[i][t]) / out.de_x[i][t]);
    }
    out.sim_x.push_back(std::move(mean));
    out.max_rel_error.push_back(worst);
  }
  return out;
}

}  // namespace sgmod

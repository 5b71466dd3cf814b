#include "sgmod/density_evolution.hpp"
#include "sgmod/link_sim.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace sgmod;

namespace {

LinkSimConfig small(std::uint64_t seed = 1) {
  LinkSimConfig c;
  c.n_dims = 40;
  c.m_substreams = 4;
  c.k_streams = 15;
  c.w = 1;
  c.l_bits = 60;
  c.slots = 6;
  c.sigma2 = 0.3;
  c.seed = seed;
  c.iterations = 3;
  return c;
}

// One stream active in slot 1 only: K = 2W+1 streams means one per user.
LinkSimConfig single_stream() {
  LinkSimConfig c;
  c.n_dims = 16;
  c.m_substreams = 1;
  c.k_streams = 3;
  c.w = 1;
  c.l_bits = 3;
  c.slots = 1;
  c.sigma2 = 0.0;
  return c;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace

TEST_CASE("config validation") {
  auto c = small();
  c.l_bits = 61;
  CHECK_THROWS_AS(generate_world(c), ConfigError);
  c = small();
  c.k_streams = 16;
  CHECK_THROWS_AS(generate_world(c), ConfigError);
  c = small();
  c.power = 0.0;
  CHECK_THROWS_AS(generate_world(c), ConfigError);
  c = small();
  c.n_dims = 0;
  CHECK_THROWS_AS(generate_world(c), ConfigError);
}

TEST_CASE("same seed gives the same world") {
  const auto a = generate_world(small(5));
  const auto b = generate_world(small(5));
  CHECK(a.signatures == b.signatures);
  CHECK(a.bits == b.bits);
  CHECK(a.position == b.position);
  for (std::size_t t = 0; t < a.received.size(); ++t) CHECK(a.received[t] == b.received[t]);
  const auto c = generate_world(small(6));
  CHECK(!(a.signatures == c.signatures));
}

TEST_CASE("signatures have unit norm and the right cross-correlation") {
  const auto st = generate_world(small());
  const double n = st.config.n_dims;
  for (Eigen::Index j = 0; j < st.signatures.cols(); ++j) {
    CHECK(std::abs(st.signatures.col(j).squaredNorm() - 1.0) < 1e-14);
    CHECK((st.signatures.col(j).array().abs() - 1.0 / std::sqrt(n)).abs().maxCoeff() < 1e-15);
  }
  std::vector<double> sq;
  for (Eigen::Index a = 0; a < st.signatures.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < st.signatures.cols(); ++b) {
      const double d = st.signatures.col(a).dot(st.signatures.col(b));
      sq.push_back(d * d);
    }
  }
  const auto ms = mean_se(sq);
  CHECK(std::abs(ms.mean - 1.0 / n) < 3.0 * ms.se);
}

TEST_CASE("interleavers put the replicas of a bit in distinct sections") {
  auto c = small();
  c.m_substreams = 3;  // M = 2W+1: one replica per section
  const auto st = generate_world(c);
  const int ls = c.symbols_per_slot();
  for (std::size_t cw = 0; cw < st.codewords.size(); ++cw) {
    for (int l = 0; l < c.l_bits; ++l) {
      std::vector<int> sections;
      for (int m = 0; m < c.m_substreams; ++m) {
        sections.push_back(st.slot_of(static_cast<int>(cw), m, l) - st.codewords[cw].start_slot);
        CHECK(st.symbol_of(static_cast<int>(cw), m, l) < ls);
      }
      std::sort(sections.begin(), sections.end());
      CHECK(sections == std::vector<int>{0, 1, 2});
    }
  }
}

TEST_CASE("single noiseless stream") {
  auto st = generate_world(single_stream());
  REQUIRE(st.codewords.size() == 1);
  const auto v = modulate_slot(st, 1);
  const int cw = 0;
  for (int l = 0; l < 3; ++l) {
    if (st.slot_of(cw, 0, l) != 1) continue;
    const int r = st.symbol_of(cw, 0, l);
    CHECK((v.col(r) - st.bits[0][l] * st.signatures.col(0)).norm() == 0.0);
    CHECK(matched_filter(st, cw, 0, l) == doctest::Approx(st.bits[0][l]).epsilon(1e-14));
  }
  // Replicas outside the observed slots are reported as NaN.
  for (int l = 0; l < 3; ++l) {
    if (st.slot_of(cw, 0, l) > 1) CHECK(std::isnan(matched_filter(st, cw, 0, l)));
  }
}

TEST_CASE("flipping every bit negates the signal") {
  auto st = generate_world(small());
  const auto v = modulate_slot(st, 4);
  for (auto& b : st.bits) {
    for (auto& x : b) x = -x;
  }
  CHECK((modulate_slot(st, 4) + v).norm() == 0.0);
}

TEST_CASE("received energy per dimension is load plus noise") {
  auto c = small();
  c.n_dims = 60;
  c.k_streams = 60;
  c.l_bits = 300;
  c.slots = 8;
  const auto st = generate_world(c);
  std::vector<double> samples;
  for (int t = c.sections(); t <= c.slots; ++t) {  // all 2W+1 users active
    const auto& y = st.received[static_cast<std::size_t>(t - 1)];
    for (Eigen::Index col = 0; col < y.cols(); ++col) samples.push_back(y.col(col).squaredNorm() / c.n_dims);
  }
  const auto ms = mean_se(samples);
  CHECK(std::abs(ms.mean - (c.load() * c.power + c.sigma2)) < 3.0 * ms.se);
}

TEST_CASE("no cancellation leaves the residual equal to the received signal") {
  const auto st = generate_world(small());
  for (std::size_t t = 0; t < st.received.size(); ++t) CHECK(st.residual[t] == st.received[t]);
}

TEST_CASE("perfect cancellation leaves noise only") {
  auto c = small();
  c.l_bits = 300;
  auto st = generate_world(c);
  for (std::size_t cw = 0; cw < st.codewords.size(); ++cw) {
    for (int m = 0; m < c.m_substreams; ++m) {
      for (int l = 0; l < c.l_bits; ++l) st.estimate[cw][static_cast<std::size_t>(m * c.l_bits + l)] = st.bits[cw][l];
    }
  }
  refresh_residual(st);
  std::vector<double> energy, filter_noise;
  for (const auto& r : st.residual) {
    for (Eigen::Index col = 0; col < r.cols(); ++col) energy.push_back(r.col(col).squaredNorm() / c.n_dims);
  }
  for (std::size_t cw = 0; cw < st.codewords.size(); ++cw) {
    for (int l = 0; l < c.l_bits; ++l) {
      if (st.slot_of(static_cast<int>(cw), 0, l) > c.slots) continue;
      const double q = matched_filter(st, static_cast<int>(cw), 0, l);
      const double noise = q - st.bits[cw][l] / std::sqrt(static_cast<double>(c.m_substreams));
      filter_noise.push_back(noise * noise);
    }
  }
  const auto e = mean_se(energy);
  CHECK(std::abs(e.mean - c.sigma2) < 3.0 * e.se);
  const auto f = mean_se(filter_noise);
  CHECK(std::abs(f.mean - c.sigma2 / c.power) < 3.0 * f.se);
}

TEST_CASE("noiseless genie estimates saturate to the true bits") {
  auto c = small();
  c.sigma2 = 0.0;
  auto st = generate_world(c);
  for (std::size_t cw = 0; cw < st.codewords.size(); ++cw) {
    for (int m = 0; m < c.m_substreams; ++m) {
      for (int l = 0; l < c.l_bits; ++l) st.estimate[cw][static_cast<std::size_t>(m * c.l_bits + l)] = st.bits[cw][l];
    }
  }
  refresh_residual(st);
  for (int l = 0; l < c.l_bits; ++l) CHECK(combine_and_estimate(st, 0, l) == st.bits[0][l]);
}

TEST_CASE("combining weights") {
  const std::vector<double> equal(5, 0.7);
  for (double w : combining_weights(equal)) CHECK(w == doctest::Approx(0.2));
  const std::vector<double> v{1.0, 2.0, 4.0};
  const auto w = combining_weights(v);
  CHECK(w[0] == doctest::Approx(4.0 / 7.0));
  CHECK(w[1] == doctest::Approx(2.0 / 7.0));
  CHECK(w[2] == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("leave-one-out LLR drops exactly one replica") {
  auto st = generate_world(small());
  pic_iteration(st);
  const int m = st.config.m_substreams;
  const double full = combined_llr(st, 3, 7);
  double dropped = 0.0;
  for (int k = 0; k < m; ++k) dropped += full - combined_llr(st, 3, 7, k);
  CHECK(dropped == doctest::Approx(full).epsilon(1e-10));
}

TEST_CASE("estimates stay in [-1, 1] and error falls over the first iterations") {
  auto c = small();
  c.n_dims = 100;
  c.k_streams = 60;  // load 0.6
  c.m_substreams = 8;
  c.l_bits = 150;
  c.slots = 10;
  c.sigma2 = 0.2;
  auto st = generate_world(c);
  for (int i = 0; i < 3; ++i) {
    pic_iteration(st);
    for (const auto& e : st.estimate) {
      for (double u : e) CHECK(std::abs(u) <= 1.0);
    }
  }
  REQUIRE(st.mean_abs_error.size() == 4);
  for (std::size_t i = 1; i < st.mean_abs_error.size(); ++i) CHECK(st.mean_abs_error[i] <= st.mean_abs_error[i - 1]);
}

TEST_CASE("measured SINR after one iteration matches the replica average") {
  LinkSimConfig c;  // N = 200, M = 16, K = 200, W = 2
  c.slots = 12;
  auto st = generate_world(c);
  const auto x0 = st.x_hat;
  estimate_bits(st);
  double ratio_sum = 0.0;
  int count = 0;
  for (std::size_t cw = 0; cw < st.codewords.size(); ++cw) {
    if (st.codewords[cw].start_slot + 2 * c.w > c.slots) continue;
    // (1/M) sum over replicas of 1/x, averaged over the packet's bits.
    double predicted = 0.0;
    for (int l = 0; l < c.l_bits; ++l) {
      for (int m = 0; m < c.m_substreams; ++m) {
        predicted += 1.0 / x0[static_cast<std::size_t>(st.slot_of(static_cast<int>(cw), m, l) - 1)];
      }
    }
    predicted /= c.m_substreams * c.l_bits;
    ratio_sum += st.sinr[cw] / predicted;
    ++count;
  }
  const double mean_ratio = ratio_sum / count;
  CHECK(std::abs(mean_ratio - 1.0) < 0.10);
}

TEST_CASE("threshold extremes in SIC mode") {
  auto st = generate_world(small());
  estimate_bits(st);
  sic_decode_step(st, Snr::infinity());
  for (bool d : st.decoded) CHECK(!d);

  auto all = generate_world(small());
  estimate_bits(all);
  sic_decode_step(all, Snr(0.0));
  for (bool d : all.decoded) CHECK(d);
  // Residual is now exactly the noise added at generation.
  for (int t = 1; t <= all.config.slots; ++t) {
    const Eigen::MatrixXd noise = all.received[static_cast<std::size_t>(t - 1)] - modulate_slot(all, t);
    CHECK((all.residual[static_cast<std::size_t>(t - 1)] - noise).norm() < 1e-10);
  }
}

TEST_CASE("SIC decodes from the oldest packets forward") {
  LinkSimConfig c;
  c.n_dims = 100;
  c.k_streams = 100;
  c.m_substreams = 16;
  c.l_bits = 200;
  c.slots = 16;
  c.sigma2 = 0.5;
  c.iterations = 6;
  c.receiver = Receiver::ModifiedSic;
  // Just below the boundary SINR density evolution predicts for the first
  // undecoded packets after one iteration.
  SystemParams p;
  p.alpha = c.load();
  p.sigma2 = c.sigma2;
  p.w = c.w;
  p.theta = Snr::infinity();
  DeOptions o;
  o.max_iter = 1;
  const auto de = run_de(p, Receiver::TwoStagePic, GridSpec{Model::Discrete, 0, double(c.slots), 1}, o);
  // Grid index t is slot t; the oldest packets are centred on slot w + 1.
  c.theta = Snr(0.9 * de.profiles[1].z[static_cast<std::size_t>(c.w + 1)]);

  const auto r = run_link_sim(c);
  // Front: latest start slot s such that every packet starting at or before s
  // is decoded. Measured SINRs are noisy at this size, so a few later packets
  // may cross early; the front itself must start at the boundary and advance.
  const auto front = [&](const std::vector<int>& decoded) {
    std::vector<bool> done(r.codewords.size(), false);
    for (int id : decoded) done[static_cast<std::size_t>(id)] = true;
    int f = 0;
    for (int s = 1; s <= c.slots; ++s) {
      for (std::size_t k = 0; k < r.codewords.size(); ++k) {
        if (r.codewords[k].start_slot == s && !done[k]) return f;
      }
      f = s;
    }
    return f;
  };
  std::vector<int> fronts;
  for (std::size_t i = 1; i < r.decoded.size(); ++i) fronts.push_back(front(r.decoded[i]));
  INFO("fronts: " << doctest::toString(fronts.front()) << " .. " << fronts.back());
  // After one iteration the oldest packets decode far more often than the rest.
  double oldest = 0, oldest_n = 0, rest = 0, rest_n = 0;
  std::vector<bool> first(r.codewords.size(), false);
  for (int id : r.decoded[1]) first[static_cast<std::size_t>(id)] = true;
  for (std::size_t k = 0; k < r.codewords.size(); ++k) {
    const bool is_oldest = r.codewords[k].start_slot == 1;
    (is_oldest ? oldest : rest) += first[k] ? 1.0 : 0.0;
    (is_oldest ? oldest_n : rest_n) += 1.0;
  }
  CHECK(oldest / oldest_n > 0.5);
  CHECK(oldest / oldest_n > 3.0 * rest / rest_n);
  for (std::size_t i = 1; i < fronts.size(); ++i) CHECK(fronts[i] >= fronts[i - 1]);
  CHECK(fronts.back() >= fronts.front() + 3);
}

#pragma once

#include "sgmod/density_evolution.hpp"
#include "sgmod/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sgmod {

/**
 * Finite-size system. 2W+1 users each carry K/(2W+1) streams; every packet
 * spans 2W+1 slots (one section per slot) and user u starts a new packet at
 * slots u+1, u+1+(2W+1), ... Packets that would have started before slot 1
 * are absent, which is the known boundary of the coupled chain.
 */
struct LinkSimConfig {
  int n_dims = 200;         // N, signal dimensions per symbol
  int m_substreams = 16;    // M, replicas per bit
  int k_streams = 200;      // K, total data streams
  int w = 2;                // packets have 2W+1 sections
  int l_bits = 200;         // L, bits per packet
  int slots = 20;           // observed slots 1..slots
  double sigma2 = 0.5;
  double power = 1.0;       // P per modulated stream
  std::uint64_t seed = 1;
  int iterations = 5;
  Receiver receiver = Receiver::TwoStagePic;
  Snr theta = Snr::infinity();  // decoding threshold (modified SIC only)

  void validate() const;
  int sections() const { return 2 * w + 1; }
  int symbols_per_slot() const { return l_bits / sections(); }
  int streams_per_user() const { return k_streams / sections(); }
  double load() const { return static_cast<double>(k_streams) / n_dims; }
};

/// One packet of one stream: the unit that is decoded (a codeword).
struct Codeword {
  int stream;
  int start_slot;   // slot carrying section 0
  int centre_slot;  // start_slot + W, the time index density evolution uses
};

struct LinkSimState {
  LinkSimConfig config;

  // Signature matrix, N x (K M); column k*M + m is s_{k,m}.
  Eigen::MatrixXd signatures;
  // Interleavers per (stream, substream): packet position of bit l and its inverse.
  std::vector<std::int32_t> position;  // [(k*M + m)*L + l]
  std::vector<std::int32_t> bit_at;    // [(k*M + m)*L + p]

  std::vector<Codeword> codewords;
  std::vector<std::vector<double>> bits;       // per codeword, L symbols in {-1, +1}
  std::vector<std::vector<int>> active;        // [slot-1][k] -> codeword or -1

  std::vector<Eigen::MatrixXd> received;       // per slot, N x L/(2W+1)
  std::vector<Eigen::MatrixXd> residual;       // received minus reconstruction
  std::vector<Eigen::MatrixXd> filtered;       // per slot, (K M) x L/(2W+1): s^T residual / sqrt(P)

  std::vector<std::vector<double>> estimate;   // per codeword, [m*L + l] replica estimate
  std::vector<double> x_hat;                   // per slot, residual energy per dimension / P
  std::vector<double> sinr;                    // per codeword, measured combiner SINR
  std::vector<bool> decoded;                   // per codeword
  int iteration = 0;

  // Histories, index = iteration.
  std::vector<std::vector<double>> x_hat_history;
  std::vector<std::vector<double>> sinr_history;     // entry 0 is all zeros
  std::vector<std::vector<int>> decoded_history;     // decoded codeword ids
  std::vector<double> mean_abs_error;                // mean |tanh(Lambda) - u| over bits

  int slot_of(int codeword, int m, int bit) const;
  int symbol_of(int codeword, int m, int bit) const;
};

LinkSimState generate_world(const LinkSimConfig& config);

/// Noiseless sum of every active stream in a slot (1-based), N x L/(2W+1).
Eigen::MatrixXd modulate_slot(const LinkSimState& state, int slot);

/// Matched-filter output for replica m of a bit, taken from the current
/// residual with the replica's own reconstruction added back, so the signal
/// part is u / sqrt(M). NaN if the replica lies outside the observed slots.
double matched_filter(const LinkSimState& state, int codeword, int m, int bit);

/// Normalised combining weights xi_m = (1/x_m) / sum(1/x_m').
std::vector<double> combining_weights(std::span<const double> variances);

/// Halved LLR of a bit: sum over replicas (optionally leaving one out) of
/// q_m / (sqrt(M) x_m). Equal to (sum 1/x_m / sqrt(M)) * sum xi_m q_m.
double combined_llr(const LinkSimState& state, int codeword, int bit, std::optional<int> exclude = {});

/// tanh of combined_llr: the conditional-mean estimate of the bit.
double combine_and_estimate(const LinkSimState& state, int codeword, int bit, std::optional<int> exclude = {});

/// New replica estimates (leave-one-out) and per-codeword SINR from the current residual.
void estimate_bits(LinkSimState& state);

/// Subtract the reconstruction from the received signal and re-measure x_hat.
void refresh_residual(LinkSimState& state);

/// estimate_bits then refresh_residual.
void pic_iteration(LinkSimState& state);

/// Codewords with measured SINR > theta are decoded (genie: estimates become
/// the true bits) and removed from the residual.
void sic_decode_step(LinkSimState& state, Snr theta);

struct LinkSimResult {
  LinkSimConfig config;
  std::vector<std::vector<double>> x_hat;       // [iteration][slot-1]
  std::vector<std::vector<double>> sinr;        // [iteration][codeword]
  std::vector<std::vector<int>> decoded;        // [iteration] -> codeword ids
  std::vector<Codeword> codewords;
  std::vector<double> mean_abs_error;
};

LinkSimResult run_link_sim(const LinkSimConfig& config);

/// Averaged link simulation next to discrete density evolution at the same
/// load, noise, window and threshold.
struct DeComparison {
  std::vector<std::vector<double>> de_x;    // [iteration][slot-1]
  std::vector<std::vector<double>> sim_x;   // mean over seeds
  std::vector<double> max_rel_error;        // per iteration, over slots
  int seeds = 0;
};

DeComparison compare_with_de(const LinkSimConfig& config, int n_seeds);

}  // namespace sgmod

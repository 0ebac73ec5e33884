#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "homsim/schmidt.hpp"

namespace homsim {

// Two sequentially written single-photon pulses sharing one decomposition.
struct TwoPhotonInput {
  TwoPhotonInput(SchmidtDecomposition dec, TemporalEnvelope env1, TemporalEnvelope env2);

  SchmidtDecomposition decomposition;
  TemporalEnvelope envelope_1;
  TemporalEnvelope envelope_2;
};

// Joint photon-number distribution over the two readout pulses ('+' first
// stage, '-' second) with the two-photon sector density matrix on the basis
// {|2,0>, |1,1>, |0,2>}. rho2 keeps coherence only between |2,0> and |0,2>
// (matched temporal-mode patterns); coherences to |1,1> have no matching
// pattern and are stored as zero. Its diagonal equals the corresponding
// probabilities and its trace is the total two-photon efficiency.
struct OutputStatistics {
  double p00 = 0.0, p10 = 0.0, p01 = 0.0;
  double p20 = 0.0, p11 = 0.0, p02 = 0.0;
  std::array<std::complex<double>, 9> rho2{};  // row-major on {20, 11, 02}

  double truncation_1 = 0.0;  // envelope weight left outside the mode cutoff
  double truncation_2 = 0.0;
  std::size_t modes_used = 0;

  double total() const { return p00 + p10 + p01 + p20 + p11 + p02; }
  double two_photon_trace() const { return p20 + p11 + p02; }
};

// Derived Hong-Ou-Mandel figures. Conditional fields are absent when the
// two-photon sector is empty; reporting 0 there would fake perfect
// anti-bunching.
struct HomMetrics {
  double coincidence = 0.0;                       // P(1,1)
  std::optional<double> bunching_conditional;     // (P20 + P02) / tr rho2
  std::optional<double> noon_fidelity;            // <NOON| rho2 |NOON> / tr rho2
  double total_efficiency = 0.0;                  // P20 + P11 + P02
};

struct StatisticsOptions {
  // Envelope weight both photons may lose to the cutoff before the
  // computation refuses to continue (dropped weight is dropped probability).
  double truncation_bound = 1e-6;
};

// Closed-form statistics of two independent single photons sent through the
// per-mode channel e_{+/-,i} = sqrt(lambda_i/2) (e_{1,i} +/- e_{2,i})
//                              + sqrt(1 - lambda_i) e_{vac,i},
// using the first mode_cutoff Schmidt modes. Envelope weight beyond the
// cutoff is routed entirely to loss (a lambda = 0 mode), which keeps the
// distribution exactly normalised.
OutputStatistics analytic_statistics(const TwoPhotonInput& input, std::size_t mode_cutoff,
                                     const StatisticsOptions& opts = {});

// Brute-force validator: builds the two-photon state over the 2K signal
// modes, applies the channel as an explicit passive transformation into the
// 4K-mode space (signal + vacuum ancillae), and reads the statistics off the
// transformed state vector. Limited to mode_cutoff <= 6.
OutputStatistics fock_oracle(const TwoPhotonInput& input, std::size_t mode_cutoff,
                             const StatisticsOptions& opts = {});

// Largest absolute difference over the six probabilities and the rho2
// entries.
double max_deviation(const OutputStatistics& a, const OutputStatistics& b);

HomMetrics hom_metrics(const OutputStatistics& stats);

struct DelayPoint {
  double delay = 0.0;
  double truncated_weight = 0.0;  // envelope weight shifted outside [0, T_W]
  OutputStatistics statistics;
  HomMetrics metrics;
};

struct DelaySweepOptions {
  // Evaluates the base envelope at shifted times; linear interpolation of the
  // grid samples when absent.
  std::function<std::complex<double>(double)> sampler;
  StatisticsOptions statistics;
  Execution exec = Execution::parallel;
};

// HOM dip: envelope_2(t) = base(t - delay), truncated to the window and
// renormalised, against envelope_1 = base.
std::vector<DelayPoint> delay_sweep(const SchmidtDecomposition& dec,
                                    const TemporalEnvelope& base,
                                    std::span<const double> delays, std::size_t mode_cutoff,
                                    const DelaySweepOptions& opts = {});

// Single delayed-and-renormalised envelope; returns the truncated weight.
TemporalEnvelope delayed_envelope(const TemporalEnvelope& base, double delay,
                                  const std::function<std::complex<double>(double)>& sampler,
                                  double* truncated_weight = nullptr);

}  // namespace homsim

#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "qmeter/measurement.hpp"
#include "qmeter/metrics.hpp"

namespace qmeter::seq {

/// N-fold repetition of the weak measurement with Bayesian concatenation of
/// the outcome tuple into a binary result.
struct SequenceSpec {
  long n_steps = 1;
  MeasurementParams params;
  QubitState qubit = QubitState::reference();

  enum class Concat { bayes_argmax };
  Concat concat = Concat::bayes_argmax;
};

enum class Label : int { g = 0, e = 1 };

/// Exact channel over the sufficient statistic T = sum_i n_i. The joint
/// outcome likelihood factorizes, so posterior and conditional state depend
/// on the tuple only through T:
///   p_T = p_g0 Pois(T; N|a1|^2) + p_e0 Pois(T; N|a2|^2).
struct StatTable {
  long n_steps = 1;
  num::ProbVector p_t;
  std::vector<std::optional<QubitState>> rho_given_t;
  std::vector<Label> label;  // posterior argmax, ties resolve to g

  std::size_t size() const { return p_t.size(); }
};

/// Build the exact table. Requires the vacuum preparation.
StatTable build_stat_table(const SequenceSpec& spec);

/// Assemble the binary outcome channel {e, g} by summing the T-partition.
meas::OutcomeChannel two_outcome_channel(const StatTable& table);

/// Unconditional post state after N steps: populations unchanged, coherence
/// damped by the per-step factor to the Nth power.
QubitState sequence_post_state(const SequenceSpec& spec);

/// Figures of merit of the concatenated measurement: xi from the
/// unconditional coherence, eta and eta_xr from the binary channel.
metrics::MetricsReport sequence_metrics(const SequenceSpec& spec);

/// Trajectory-sampling estimate of the same binary channel, applying the
/// Bayesian posterior update outcome-by-outcome. Deterministic given seed.
struct MonteCarloResult {
  double p_outcome_e = 0.0;
  double p_outcome_g = 0.0;
  double se_p = 0.0;  // binomial standard error of the outcome split
  meas::OutcomeChannel channel;
  metrics::MetricsReport report;
};
MonteCarloResult monte_carlo_oracle(const SequenceSpec& spec, long n_samples,
                                    std::uint64_t seed);

/// N x (single-step dephasing work bound); each iteration includes the full
/// ancilla and memory reset.
double total_work_sequence(const SequenceSpec& spec);

/// Phenomenological scaling laws for the weak-sequence and single-strong
/// work costs.
struct ScalingModel {
  double h0 = 0.0;      // weak-limit per-step outcome entropy, nats
  int k_outcomes = 2;   // eigenstates of the measured observable
  int l_exponent = 0;   // pointer-width exponent, 0 or 1
  double sigma0 = 0.0;
};
struct ScalingPrediction {
  double w_weak_shape = 0.0;  // H_0 / eps^2, up to the fitted prefactor
  double w_strong = 0.0;      // K (l log(2 pi eps) + 1/2)
};
ScalingPrediction scaling_predictions(const ScalingModel& model, double eps);

/// Prefactor for the weak-scaling law fitted from the two smallest epsilon
/// points of a measured sweep.
double fit_weak_coefficient(std::span<const double> eps,
                            std::span<const double> w_measured, double h0);

/// Smallest N with xi, eta, eta_xr all >= threshold, by doubling then
/// bisection on the exact table. Search is bounded by ceil(20 / eps^2).
struct Thresholds {
  double xi = 0.999;
  double eta = 0.999;
  double eta_xr = 0.999;
};
struct NStarResult {
  std::optional<long> n_star;  // empty when not reached within the bound
  long n_searched_max = 0;
};
NStarResult find_n_star(const MeasurementParams& params, const QubitState& qubit,
                        const Thresholds& thresholds = {});

}  // namespace qmeter::seq

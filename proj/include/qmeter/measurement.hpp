#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qmeter/fock.hpp"
#include "qmeter/numerics.hpp"
#include "qmeter/states.hpp"

namespace qmeter::meas {

/// Ordered partition of the fine-grained outcome indices into labeled,
/// disjoint, exhaustive bins.
struct CoarseGraining {
  std::vector<std::vector<int>> bins;
  std::vector<std::string> labels;

  std::size_t size() const { return bins.size(); }
  void validate(std::size_t n_outcomes) const;

  /// Identity coarse-graining: one singleton bin per outcome.
  static CoarseGraining singletons(std::size_t n_outcomes);
  /// Photodiode-style binning: {0} vs {n > 0}.
  static CoarseGraining photodiode(std::size_t n_outcomes);
};

/// Measurement outcome set: labels, probabilities, and conditional qubit
/// states. A conditional is disengaged for an outcome retained with zero
/// probability (empty coarse-grained bin).
struct OutcomeChannel {
  std::vector<std::string> labels;
  num::ProbVector probs;
  std::vector<std::optional<QubitState>> conditionals;

  std::size_t size() const { return probs.size(); }

  /// sum_r p_r rho_{S|r}, the reconstructed unconditional state.
  QubitState average_state() const;
};

/// Outcome probabilities p_n of the fine-grained excitation-number readout.
num::ProbVector outcome_probabilities(const MeasurementParams& params,
                                      const QubitState& qubit);

/// Measurement operator M_n = diag(e^{-|a1|^2/2} a1^n/sqrt(n!) e^{-i phi},
/// e^{-|a2|^2/2} a2^n/sqrt(n!)). Vacuum preparation only.
Eigen::Matrix2cd kraus_operator(int n, const MeasurementParams& params);

/// Fine-grained channel together with the unconditional post-measurement
/// state, extracted from one construction of the joint state.
struct ChannelBundle {
  OutcomeChannel fine;
  QubitState post;
};

/// Fine-grained conditional states and probabilities. Closed form for the
/// vacuum preparation, dephased joint blocks for thermal. Outcomes below
/// 1e-300 are dropped into the tail accounting.
OutcomeChannel conditional_states(const MeasurementParams& params,
                                  const QubitState& qubit);

/// Channel and post state read off the diagonals of a (dephased) joint state.
ChannelBundle analyze_joint(const fock::JointState& joint);

/// One-stop evaluation of the fine channel and post state for a parameter
/// point, avoiding a second joint-state construction in the thermal case.
ChannelBundle analyze(const MeasurementParams& params, const QubitState& qubit);

/// p_r = sum_{n in bin r} p_n, rho_{S|r} = sum p_n rho_{S|n} / p_r.
OutcomeChannel coarse_grain(const OutcomeChannel& channel, const CoarseGraining& cg);

/// Average reduced system state after the channel: populations unchanged,
/// coherence damped by exp(-(|a1|^2+|a2|^2)/2 + a1 conj(a2)) (vacuum) or the
/// thermal counterpart.
QubitState unconditional_post_state(const MeasurementParams& params,
                                    const QubitState& qubit);

/// First-order expansion in epsilon of the channel (vacuum preparation,
/// real epsilon, |epsilon| <= 0.1, alpha_bar != 0).
struct WeakExpansion {
  num::ProbVector probs;
  OutcomeChannel channel;
};
WeakExpansion weak_expansion(const MeasurementParams& params,
                             const QubitState& qubit);

}  // namespace qmeter::meas

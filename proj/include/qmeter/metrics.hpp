#pragma once

#include <optional>
#include <string>

#include "qmeter/measurement.hpp"

namespace qmeter::metrics {

/// Figures of merit and the information-hierarchy members for one run,
/// all information quantities in nats. Undefined 0/0 ratios stay disengaged
/// rather than being reported as 0 or 1.
struct MetricsReport {
  double xi = 0.0;
  std::optional<double> eta;
  std::optional<double> eta_xr;
  std::optional<double> product;
  double s_rho_s = 0.0;      // S[rho_S(t_f)]
  double i_q = 0.0;          // fine-grained Holevo information
  double chi = 0.0;          // Holevo information of the read-out channel
  double i_classical = 0.0;  // I({j};{r})
  int d = 2;

  double log_d() const { return std::log(static_cast<double>(d)); }
};

/// Measurement strength S[rho_S(t_f)] / log d; base-independent.
double strength_xi(const QubitState& post, int d = 2);

/// Holevo information S(rho_S) - sum_r p_r S(rho_S|r).
double holevo_chi(const meas::OutcomeChannel& channel, const QubitState& post);

/// chi / S(rho_S); disengaged when S(rho_S) = 0.
std::optional<double> efficiency_eta(const meas::OutcomeChannel& channel,
                                     const QubitState& post);

/// Classical mutual information I({j};{r}) between the energy-basis
/// populations and the outcome label, from p_{j,r} = p_r <j|rho_S|r|j>.
double classical_mutual_information(const meas::OutcomeChannel& channel);

/// I({j};{r}) / chi; disengaged when chi = 0.
std::optional<double> eta_mutual(const meas::OutcomeChannel& channel,
                                 const QubitState& post);

/// Result of checking log d >= S >= I_q >= chi >= I with slack.
struct HierarchyCheck {
  bool logd_ge_s = false;
  bool s_ge_iq = false;
  bool iq_ge_chi = false;
  bool chi_ge_i = false;
  std::string first_violation;  // empty when the chain holds

  bool ok() const { return logd_ge_s && s_ge_iq && iq_ge_chi && chi_ge_i; }
};
HierarchyCheck hierarchy_check(const MetricsReport& report, double slack = 1e-9);

/// Full evaluation for one channel bundle: I_q from the fine channel, chi and
/// I from the coarse-grained one (or the fine channel when cg is absent).
MetricsReport evaluate(const meas::ChannelBundle& bundle,
                       const std::optional<meas::CoarseGraining>& cg = std::nullopt);

/// Convenience entry point building the channel for one parameter point.
MetricsReport evaluate(const MeasurementParams& params, const QubitState& qubit,
                       const std::optional<meas::CoarseGraining>& cg = std::nullopt);

}  // namespace qmeter::metrics

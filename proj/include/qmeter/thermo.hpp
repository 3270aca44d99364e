#pragma once

#include <optional>
#include <utility>

#include "qmeter/measurement.hpp"

namespace qmeter::thermo {

/// Energy and work accounting for one protocol run. Informational terms are
/// in nats; energies in the same units as omega_a; work in units of 1/beta
/// for the informational parts plus the bare energy terms.
struct ThermoLedger {
  double w_dr = 0.0;
  double w_sw = 0.0;
  double w_reset_a_min = 0.0;
  double w_reset_m_min = 0.0;
  double w_bound_dephasing = 0.0;
  double w_bound_dissipation = 0.0;
  double delta_e_s = 0.0;
  double e_a_t0 = 0.0;
  double e_a_t1 = 0.0;
  double e_a_tf = 0.0;
  double h_pn = 0.0;      // Shannon entropy of the fine outcome distribution
  double s_a_t0 = 0.0;    // initial ancilla entropy
  double h_pr = 0.0;      // Shannon entropy of the coarse-grained outcomes
  double delta_s_sa = 0.0;

  /// Total bound w_dr + w_reset_a_min + w_reset_m_min; coarse-graining
  /// independent for orthogonal binnings.
  double total_bound() const { return w_dr + w_reset_a_min + w_reset_m_min; }
};

/// Lower bound for dephasing objectification:
/// (H(p_n) - S_A(t_0)) / beta + Delta E_S.
double work_bound_dephasing(double h_pn, double s_a_t0, double delta_e_s,
                            double beta);

/// Dissipative-bath bound: the dephasing bound minus Delta S_SA / beta.
double work_bound_dissipation(double dephasing_bound, double delta_s_sa,
                              double beta);

/// Minimum ancilla and classical-memory reset work for an orthogonal
/// coarse-graining.
std::pair<double, double> reset_bounds(double e_a_t0, double e_a_tf,
                                       double h_pn, double h_pr, double s_a_t0,
                                       double beta);

/// Populate the full ledger for one run. The fine channel supplies p_n and
/// the conditional spectra; cg (optional) supplies p_r. Dephasing is taken
/// in the energy basis unless e_a_tf_alternate is given, in which case
/// w_sw = E_A(t_1) - E_A(t_f).
ThermoLedger energy_ledger(const MeasurementParams& params,
                           const QubitState& qubit,
                           const meas::ChannelBundle& bundle,
                           const std::optional<meas::CoarseGraining>& cg = std::nullopt,
                           std::optional<double> e_a_tf_alternate = std::nullopt);

/// Per-mode squared coherent-state overlap of the redundant environment
/// records, exp(-2 alpha^2 (1 - cos((m - n) t gamma))).
struct SbsParams {
  double alpha_mode = 0.0;
  double gamma = 0.0;  // rad/s
  double t = 0.0;      // s
  int delta_nm = 0;    // m - n
};
double sbs_overlap(const SbsParams& p);

/// Product over identical modes; the exponent scales with the mode count.
double sbs_overlap_multimode(const SbsParams& p, int n_modes);

}  // namespace qmeter::thermo

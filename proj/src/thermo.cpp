#include "qmeter/thermo.hpp"

#include <cmath>

namespace qmeter::thermo {

double work_bound_dephasing(double h_pn, double s_a_t0, double delta_e_s,
                            double beta) {
  if (!(beta > 0.0)) throw std::domain_error("work_bound_dephasing: beta <= 0");
  return (h_pn - s_a_t0) / beta + delta_e_s;
}

double work_bound_dissipation(double dephasing_bound, double delta_s_sa,
                              double beta) {
  if (!(beta > 0.0)) throw std::domain_error("work_bound_dissipation: beta <= 0");
  return dephasing_bound - delta_s_sa / beta;
}

std::pair<double, double> reset_bounds(double e_a_t0, double e_a_tf,
                                       double h_pn, double h_pr, double s_a_t0,
                                       double beta) {
  if (!(beta > 0.0)) throw std::domain_error("reset_bounds: beta <= 0");
  const double ancilla = e_a_t0 - e_a_tf + (h_pn - h_pr - s_a_t0) / beta;
  const double memory = h_pr / beta;
  return {ancilla, memory};
}

ThermoLedger energy_ledger(const MeasurementParams& params,
                           const QubitState& qubit,
                           const meas::ChannelBundle& bundle,
                           const std::optional<meas::CoarseGraining>& cg,
                           std::optional<double> e_a_tf_alternate) {
  params.validate();
  qubit.validate();

  ThermoLedger led;
  const double n_bar = params.init.n_bar();
  const double l1 = std::norm(params.alpha1());
  const double l2 = std::norm(params.alpha2());

  led.delta_e_s = 0.0;  // the coupling commutes with sigma_z
  led.e_a_t0 = params.omega_a * n_bar;
  led.e_a_t1 = params.omega_a * (qubit.p_g * l1 + qubit.p_e * l2 + n_bar);
  if (e_a_tf_alternate) {
    led.e_a_tf = *e_a_tf_alternate;
    led.w_sw = led.e_a_t1 - led.e_a_tf;
  } else {
    led.e_a_tf = led.e_a_t1;  // energy-basis dephasing conserves <H_A>
    led.w_sw = 0.0;
  }
  led.w_dr = led.delta_e_s + led.e_a_t1 - led.e_a_t0;

  led.h_pn = num::shannon_entropy(bundle.fine.probs).nats();
  led.s_a_t0 =
      params.init.is_vacuum() ? 0.0 : fock::thermal_entropy(params.init.beta_omega);
  if (cg) {
    auto coarse = meas::coarse_grain(bundle.fine, *cg);
    led.h_pr = num::shannon_entropy(coarse.probs).nats();
  } else {
    led.h_pr = led.h_pn;
  }

  led.w_bound_dephasing =
      work_bound_dephasing(led.h_pn, led.s_a_t0, led.delta_e_s, params.beta);
  auto [wa, wm] = reset_bounds(led.e_a_t0, led.e_a_tf, led.h_pn, led.h_pr,
                               led.s_a_t0, params.beta);
  led.w_reset_a_min = wa;
  led.w_reset_m_min = wm;

  // S[rho_SA(t_f)] from the block-diagonal spectrum: H(p_n) plus the average
  // conditional 2x2 entropy.
  std::vector<double> cond_terms;
  cond_terms.reserve(bundle.fine.size());
  for (std::size_t n = 0; n < bundle.fine.size(); ++n) {
    if (!bundle.fine.conditionals[n]) continue;
    const auto& c = *bundle.fine.conditionals[n];
    cond_terms.push_back(bundle.fine.probs[n] *
                         num::vn_entropy_2x2(c.p_g, c.p_e, c.rho_ge).nats());
  }
  const double s_s_t0 =
      num::vn_entropy_2x2(qubit.p_g, qubit.p_e, qubit.rho_ge).nats();
  led.delta_s_sa =
      led.h_pn + num::stable_sum(cond_terms) - s_s_t0 - led.s_a_t0;
  led.w_bound_dissipation =
      work_bound_dissipation(led.w_bound_dephasing, led.delta_s_sa, params.beta);
  return led;
}

double sbs_overlap(const SbsParams& p) {
  const double phase = p.delta_nm * p.t * p.gamma;
  return std::exp(-2.0 * p.alpha_mode * p.alpha_mode * (1.0 - std::cos(phase)));
}

double sbs_overlap_multimode(const SbsParams& p, int n_modes) {
  if (n_modes < 1) throw std::domain_error("sbs_overlap_multimode: n_modes < 1");
  const double phase = p.delta_nm * p.t * p.gamma;
  return std::exp(-2.0 * n_modes * p.alpha_mode * p.alpha_mode *
                  (1.0 - std::cos(phase)));
}

}  // namespace qmeter::thermo

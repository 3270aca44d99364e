#include "qmeter/metrics.hpp"

#include <cmath>

namespace qmeter::metrics {

namespace {

constexpr double kZeroEntropy = 1e-14;

double conditional_entropy_sum(const meas::OutcomeChannel& channel) {
  std::vector<double> terms;
  terms.reserve(channel.size());
  for (std::size_t r = 0; r < channel.size(); ++r) {
    if (!channel.conditionals[r] || channel.probs[r] <= 0.0) continue;
    const auto& c = *channel.conditionals[r];
    terms.push_back(channel.probs[r] *
                    num::vn_entropy_2x2(c.p_g, c.p_e, c.rho_ge).nats());
  }
  return num::stable_sum(terms);
}

}  // namespace

double strength_xi(const QubitState& post, int d) {
  return num::vn_entropy_2x2(post.p_g, post.p_e, post.rho_ge).nats() /
         std::log(static_cast<double>(d));
}

double holevo_chi(const meas::OutcomeChannel& channel, const QubitState& post) {
  const double s = num::vn_entropy_2x2(post.p_g, post.p_e, post.rho_ge).nats();
  return s - conditional_entropy_sum(channel);
}

std::optional<double> efficiency_eta(const meas::OutcomeChannel& channel,
                                     const QubitState& post) {
  const double s = num::vn_entropy_2x2(post.p_g, post.p_e, post.rho_ge).nats();
  if (s < kZeroEntropy) return std::nullopt;
  return (s - conditional_entropy_sum(channel)) / s;
}

double classical_mutual_information(const meas::OutcomeChannel& channel) {
  // p_{j,r} = p_r <j|rho_{S|r}|j>, j over the energy basis
  std::vector<double> pj(2, 0.0);
  std::vector<std::array<double, 2>> joint(channel.size());
  double total = 0.0;
  for (std::size_t r = 0; r < channel.size(); ++r) {
    if (!channel.conditionals[r] || channel.probs[r] <= 0.0) {
      joint[r] = {0.0, 0.0};
      continue;
    }
    joint[r][0] = channel.probs[r] * channel.conditionals[r]->p_g;
    joint[r][1] = channel.probs[r] * channel.conditionals[r]->p_e;
    pj[0] += joint[r][0];
    pj[1] += joint[r][1];
    total += channel.probs[r];
  }
  if (total <= 0.0) return 0.0;
  std::vector<double> terms;
  terms.reserve(2 * channel.size());
  for (std::size_t r = 0; r < channel.size(); ++r) {
    const double pr = joint[r][0] + joint[r][1];
    if (pr <= 0.0) continue;
    for (int j = 0; j < 2; ++j) {
      const double pjr = joint[r][static_cast<std::size_t>(j)];
      if (pjr <= 0.0 || pj[static_cast<std::size_t>(j)] <= 0.0) continue;
      terms.push_back(pjr *
                      std::log(pjr / (pj[static_cast<std::size_t>(j)] * pr)));
    }
  }
  return std::max(0.0, num::stable_sum(terms));
}

std::optional<double> eta_mutual(const meas::OutcomeChannel& channel,
                                 const QubitState& post) {
  const double chi = holevo_chi(channel, post);
  if (chi < kZeroEntropy) return std::nullopt;
  return classical_mutual_information(channel) / chi;
}

HierarchyCheck hierarchy_check(const MetricsReport& report, double slack) {
  HierarchyCheck h;
  h.logd_ge_s = report.log_d() >= report.s_rho_s - slack;
  h.s_ge_iq = report.s_rho_s >= report.i_q - slack;
  h.iq_ge_chi = report.i_q >= report.chi - slack;
  h.chi_ge_i = report.chi >= report.i_classical - slack;
  if (!h.logd_ge_s)
    h.first_violation = "log d >= S[rho_S]";
  else if (!h.s_ge_iq)
    h.first_violation = "S[rho_S] >= I_q";
  else if (!h.iq_ge_chi)
    h.first_violation = "I_q >= chi";
  else if (!h.chi_ge_i)
    h.first_violation = "chi >= I({j};{r})";
  return h;
}

MetricsReport evaluate(const meas::ChannelBundle& bundle,
                       const std::optional<meas::CoarseGraining>& cg) {
  MetricsReport rep;
  rep.s_rho_s =
      num::vn_entropy_2x2(bundle.post.p_g, bundle.post.p_e, bundle.post.rho_ge)
          .nats();
  rep.xi = rep.s_rho_s / rep.log_d();
  rep.i_q = rep.s_rho_s - conditional_entropy_sum(bundle.fine);

  const meas::OutcomeChannel* readout = &bundle.fine;
  meas::OutcomeChannel coarse;
  if (cg) {
    coarse = meas::coarse_grain(bundle.fine, *cg);
    readout = &coarse;
  }
  rep.chi = rep.s_rho_s - conditional_entropy_sum(*readout);
  rep.i_classical = classical_mutual_information(*readout);
  if (rep.s_rho_s >= kZeroEntropy) rep.eta = rep.chi / rep.s_rho_s;
  if (rep.chi >= kZeroEntropy) rep.eta_xr = rep.i_classical / rep.chi;
  if (rep.eta && rep.eta_xr) rep.product = rep.xi * *rep.eta * *rep.eta_xr;
  return rep;
}

MetricsReport evaluate(const MeasurementParams& params, const QubitState& qubit,
                       const std::optional<meas::CoarseGraining>& cg) {
  return evaluate(meas::analyze(params, qubit), cg);
}

}  // namespace qmeter::metrics

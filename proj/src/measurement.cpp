#include "qmeter/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmeter::meas {

namespace {

constexpr double kSupportFloor = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

Complex polar1(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

void CoarseGraining::validate(std::size_t n_outcomes) const {
  if (bins.empty()) throw std::invalid_argument("CoarseGraining: no bins");
  if (labels.size() != bins.size())
    throw std::invalid_argument("CoarseGraining: label/bin count mismatch");
  std::vector<char> seen(n_outcomes, 0);
  for (const auto& bin : bins) {
    if (bin.empty())
      throw std::invalid_argument("CoarseGraining: empty bin");
    for (int idx : bin) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= n_outcomes)
        throw std::invalid_argument("CoarseGraining: bin outside channel support");
      if (seen[static_cast<std::size_t>(idx)])
        throw std::invalid_argument("CoarseGraining: bins not disjoint");
      seen[static_cast<std::size_t>(idx)] = 1;
    }
  }
  for (char s : seen)
    if (!s) throw std::invalid_argument("CoarseGraining: bins not exhaustive");
}

CoarseGraining CoarseGraining::singletons(std::size_t n_outcomes) {
  CoarseGraining cg;
  for (std::size_t n = 0; n < n_outcomes; ++n) {
    cg.bins.push_back({static_cast<int>(n)});
    cg.labels.push_back(std::to_string(n));
  }
  return cg;
}

CoarseGraining CoarseGraining::photodiode(std::size_t n_outcomes) {
  if (n_outcomes < 2)
    throw std::invalid_argument("photodiode: needs at least two outcomes");
  CoarseGraining cg;
  cg.bins.push_back({0});
  cg.labels.push_back("dark");
  std::vector<int> rest;
  for (std::size_t n = 1; n < n_outcomes; ++n) rest.push_back(static_cast<int>(n));
  cg.bins.push_back(std::move(rest));
  cg.labels.push_back("click");
  return cg;
}

QubitState OutcomeChannel::average_state() const {
  QubitState avg{0.0, 0.0, {0.0, 0.0}};
  for (std::size_t r = 0; r < size(); ++r) {
    if (!conditionals[r]) continue;
    avg.p_g += probs[r] * conditionals[r]->p_g;
    avg.p_e += probs[r] * conditionals[r]->p_e;
    avg.rho_ge += probs[r] * conditionals[r]->rho_ge;
  }
  return avg;
}

num::ProbVector outcome_probabilities(const MeasurementParams& params,
                                      const QubitState& qubit) {
  params.validate();
  qubit.validate();
  if (!params.init.is_vacuum()) {
    // diagonal-only summation over the thermal source column weights
    const auto w = fock::thermal_weights(params.init.beta_omega);
    const int dim = fock::joint_dimension(params);
    const Complex a1 = params.alpha1();
    const Complex a2 = params.alpha2();
    num::ProbVector p;
    p.weights.assign(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t m = 0; m < w.size(); ++m) {
      for (int n = 0; n < dim; ++n) {
        const double g =
            std::norm(fock::displacement_element(n, static_cast<int>(m), a1));
        const double e =
            std::norm(fock::displacement_element(n, static_cast<int>(m), a2));
        p.weights[static_cast<std::size_t>(n)] +=
            w[m] * (qubit.p_g * g + qubit.p_e * e);
      }
    }
    p.tail_bound =
        std::max(0.0, 1.0 - num::stable_sum(p.weights)) + w.tail_bound;
    if (p.tail_bound > num::kTailTol)
      throw num::TruncationError("outcome_probabilities: tail exceeds tolerance");
    return p;
  }
  const double l1 = std::norm(params.alpha1());
  const double l2 = std::norm(params.alpha2());
  const double lam = std::max(l1, l2);
  const int n_max = num::fock_truncation(lam);
  num::ProbVector p;
  p.weights.resize(static_cast<std::size_t>(n_max) + 1);
  const double lg = qubit.p_g > 0.0 ? std::log(qubit.p_g) : kNegInf;
  const double le = qubit.p_e > 0.0 ? std::log(qubit.p_e) : kNegInf;
  for (int n = 0; n <= n_max; ++n) {
    const double a = lg + num::poisson_log_pmf(n, l1);
    const double b = le + num::poisson_log_pmf(n, l2);
    p.weights[static_cast<std::size_t>(n)] = std::exp(log_add_exp(a, b));
  }
  p.tail_bound = num::poisson_tail_bound(lam, n_max + 1);
  if (p.tail_bound > num::kTailTol)
    throw num::TruncationError("outcome_probabilities: tail exceeds tolerance");
  return p;
}

Eigen::Matrix2cd kraus_operator(int n, const MeasurementParams& params) {
  if (!params.init.is_vacuum())
    throw std::invalid_argument(
        "kraus_operator: no single-operator form for a thermal preparation");
  if (n < 0) throw std::out_of_range("kraus_operator: n < 0");
  const Complex a1 = params.alpha1();
  const Complex a2 = params.alpha2();
  auto amp = [n](Complex a) -> Complex {
    if (a == Complex{0.0, 0.0}) return n == 0 ? 1.0 : 0.0;
    const double log_mag = -0.5 * std::norm(a) + n * std::log(std::abs(a)) -
                           0.5 * num::log_factorial(n);
    return std::exp(log_mag) * polar1(n * std::arg(a));
  };
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = amp(a1) * polar1(-params.phi);
  m(1, 1) = amp(a2);
  return m;
}

namespace {

OutcomeChannel vacuum_fine_channel(const MeasurementParams& params,
                                   const QubitState& qubit) {
  const Complex a1 = params.alpha1();
  const Complex a2 = params.alpha2();
  const double l1 = std::norm(a1);
  const double l2 = std::norm(a2);
  const double lam = std::max(l1, l2);
  const int n_max = num::fock_truncation(lam);

  const double lg = qubit.p_g > 0.0 ? std::log(qubit.p_g) : kNegInf;
  const double le = qubit.p_e > 0.0 ? std::log(qubit.p_e) : kNegInf;
  const Complex cross = a1 * std::conj(a2);
  const double log_coh_mag0 =
      std::abs(qubit.rho_ge) > 0.0 ? std::log(std::abs(qubit.rho_ge)) : kNegInf;
  const double coh_phase0 = std::arg(qubit.rho_ge) - params.phi;

  OutcomeChannel ch;
  double pruned = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double la = lg + num::poisson_log_pmf(n, l1);
    const double lb = le + num::poisson_log_pmf(n, l2);
    const double lpn = log_add_exp(la, lb);
    const double pn = std::exp(lpn);
    if (pn < kSupportFloor) continue;  // mass goes to the tail accounting
    QubitState cond;
    cond.p_g = std::exp(la - lpn);
    cond.p_e = std::exp(lb - lpn);
    if (log_coh_mag0 == kNegInf || (n > 0 && cross == Complex{0.0, 0.0})) {
      cond.rho_ge = {0.0, 0.0};
    } else {
      const double mag = std::exp(log_coh_mag0 - 0.5 * (l1 + l2) +
                                  (n > 0 ? n * std::log(std::abs(cross)) : 0.0) -
                                  num::log_factorial(n) - lpn);
      cond.rho_ge = mag * polar1(coh_phase0 + n * std::arg(cross));
    }
    ch.labels.push_back(std::to_string(n));
    ch.probs.weights.push_back(pn);
    ch.conditionals.emplace_back(cond);
  }
  const double sum = num::stable_sum(ch.probs.weights);
  pruned = std::max(0.0, 1.0 - sum - num::poisson_tail_bound(lam, n_max + 1));
  ch.probs.tail_bound =
      std::min(num::kTailTol, num::poisson_tail_bound(lam, n_max + 1) + std::max(0.0, pruned));
  return ch;
}

}  // namespace

ChannelBundle analyze_joint(const fock::JointState& joint) {
  const fock::JointState* j = &joint;
  fock::JointState dephased_storage;
  if (!joint.dephased) {
    dephased_storage = fock::dephase(joint);
    j = &dephased_storage;
  }
  ChannelBundle out;
  out.post.p_g = j->gg.trace().real();
  out.post.p_e = j->ee.trace().real();
  out.post.rho_ge = j->ge.trace();
  for (int n = 0; n < j->dim; ++n) {
    const double pn = (j->gg(n, n) + j->ee(n, n)).real();
    if (pn < kSupportFloor) continue;
    QubitState cond;
    cond.p_g = j->gg(n, n).real() / pn;
    cond.p_e = j->ee(n, n).real() / pn;
    cond.rho_ge = j->ge(n, n) / pn;
    out.fine.labels.push_back(std::to_string(n));
    out.fine.probs.weights.push_back(pn);
    out.fine.conditionals.emplace_back(cond);
  }
  out.fine.probs.tail_bound = std::min(num::kTailTol, j->tail_bound);
  return out;
}

ChannelBundle analyze(const MeasurementParams& params, const QubitState& qubit) {
  params.validate();
  qubit.validate();
  if (params.init.is_vacuum()) {
    ChannelBundle out;
    out.fine = vacuum_fine_channel(params, qubit);
    out.post = unconditional_post_state(params, qubit);
    return out;
  }
  return analyze_joint(fock::build_joint_predephasing(params, qubit));
}

OutcomeChannel conditional_states(const MeasurementParams& params,
                                  const QubitState& qubit) {
  return analyze(params, qubit).fine;
}

OutcomeChannel coarse_grain(const OutcomeChannel& channel, const CoarseGraining& cg) {
  cg.validate(channel.size());
  OutcomeChannel out;
  out.labels = cg.labels;
  out.probs.tail_bound = channel.probs.tail_bound;
  for (const auto& bin : cg.bins) {
    double pr = 0.0;
    QubitState mix{0.0, 0.0, {0.0, 0.0}};
    for (int idx : bin) {
      const auto i = static_cast<std::size_t>(idx);
      if (!channel.conditionals[i]) continue;
      const double pn = channel.probs[i];
      pr += pn;
      mix.p_g += pn * channel.conditionals[i]->p_g;
      mix.p_e += pn * channel.conditionals[i]->p_e;
      mix.rho_ge += pn * channel.conditionals[i]->rho_ge;
    }
    out.probs.weights.push_back(pr);
    if (pr > 0.0) {
      mix.p_g /= pr;
      mix.p_e /= pr;
      mix.rho_ge /= pr;
      out.conditionals.emplace_back(mix);
    } else {
      out.conditionals.emplace_back(std::nullopt);  // retained, undefined
    }
  }
  return out;
}

QubitState unconditional_post_state(const MeasurementParams& params,
                                    const QubitState& qubit) {
  params.validate();
  qubit.validate();
  QubitState post = qubit;
  if (params.init.is_vacuum()) {
    const Complex a1 = params.alpha1();
    const Complex a2 = params.alpha2();
    const Complex factor =
        std::exp(-0.5 * (std::norm(a1) + std::norm(a2)) + a1 * std::conj(a2));
    post.rho_ge = qubit.rho_ge * polar1(-params.phi) * factor;
    return post;
  }
  auto joint = fock::build_joint_predephasing(params, qubit);
  post.p_g = joint.gg.trace().real();
  post.p_e = joint.ee.trace().real();
  post.rho_ge = joint.ge.trace();
  return post;
}

WeakExpansion weak_expansion(const MeasurementParams& params,
                             const QubitState& qubit) {
  params.validate();
  qubit.validate();
  if (!params.init.is_vacuum())
    throw std::invalid_argument("weak_expansion: vacuum preparation required");
  if (std::abs(params.epsilon.imag()) > 1e-14)
    throw std::domain_error("weak_expansion: epsilon must be real");
  const double eps = params.epsilon.real();
  if (std::abs(eps) > 0.1)
    throw std::domain_error("weak_expansion: |epsilon| must be <= 0.1");
  const double lam = std::norm(params.alpha_bar);
  if (lam == 0.0)
    throw std::domain_error("weak_expansion: alpha_bar must be nonzero");

  const double re_a = params.alpha_bar.real();
  const double im_a = params.alpha_bar.imag();
  const int n_max = num::fock_truncation(lam);

  WeakExpansion out;
  out.probs.weights.resize(static_cast<std::size_t>(n_max) + 1);
  const Complex coh0 = qubit.rho_ge * polar1(-params.phi);
  for (int n = 0; n <= n_max; ++n) {
    const double base = std::exp(num::poisson_log_pmf(n, lam));
    const double shift = 2.0 * eps * re_a * (n / lam - 1.0);
    // first-order weights can dip below zero deep in the tail; clamp there
    const double pn = std::max(0.0, base * (1.0 + shift * (qubit.p_g - qubit.p_e)));
    out.probs.weights[static_cast<std::size_t>(n)] = pn;
    if (pn < kSupportFloor) continue;
    QubitState cond;
    cond.p_g = qubit.p_g * base * (1.0 + shift) / pn;
    cond.p_e = qubit.p_e * base * (1.0 - shift) / pn;
    cond.rho_ge =
        coh0 * base * (1.0 - Complex{0.0, 1.0} * (2.0 * n * eps * im_a / lam)) / pn;
    out.channel.labels.push_back(std::to_string(n));
    out.channel.probs.weights.push_back(pn);
    out.channel.conditionals.emplace_back(cond);
  }
  out.probs.tail_bound = num::poisson_tail_bound(lam, n_max + 1);
  out.channel.probs.tail_bound = out.probs.tail_bound;
  return out;
}

}  // namespace qmeter::meas

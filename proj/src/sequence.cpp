#include "qmeter/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qmeter/thermo.hpp"

namespace qmeter::seq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSupportFloor = 1e-300;

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

Complex polar1(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

StatTable build_stat_table(const SequenceSpec& spec) {
  spec.params.validate();
  spec.qubit.validate();
  if (!spec.params.init.is_vacuum())
    throw std::invalid_argument("build_stat_table: vacuum preparation required");
  if (spec.n_steps < 1)
    throw std::invalid_argument("build_stat_table: n_steps < 1");

  const double n = static_cast<double>(spec.n_steps);
  const Complex a1 = spec.params.alpha1();
  const Complex a2 = spec.params.alpha2();
  const double l1 = std::norm(a1);
  const double l2 = std::norm(a2);
  const double lam = n * std::max(l1, l2);
  const int t_max = num::fock_truncation(lam);

  const double lg = spec.qubit.p_g > 0.0 ? std::log(spec.qubit.p_g) : kNegInf;
  const double le = spec.qubit.p_e > 0.0 ? std::log(spec.qubit.p_e) : kNegInf;
  const Complex cross = a1 * std::conj(a2);
  const double log_coh0 = std::abs(spec.qubit.rho_ge) > 0.0
                              ? std::log(std::abs(spec.qubit.rho_ge))
                              : kNegInf;
  const double coh_phase0 =
      std::arg(spec.qubit.rho_ge) - n * spec.params.phi;

  StatTable table;
  table.n_steps = spec.n_steps;
  table.p_t.weights.resize(static_cast<std::size_t>(t_max) + 1);
  table.rho_given_t.resize(static_cast<std::size_t>(t_max) + 1);
  table.label.resize(static_cast<std::size_t>(t_max) + 1, Label::g);

  for (int t = 0; t <= t_max; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const double la = lg + num::poisson_log_pmf(t, n * l1);
    const double lb = le + num::poisson_log_pmf(t, n * l2);
    const double lpt = log_add_exp(la, lb);
    const double pt = std::exp(lpt);
    table.label[i] = la >= lb ? Label::g : Label::e;
    if (pt < kSupportFloor) {
      table.p_t.weights[i] = 0.0;
      continue;
    }
    table.p_t.weights[i] = pt;
    QubitState cond;
    cond.p_g = std::exp(la - lpt);
    cond.p_e = std::exp(lb - lpt);
    if (log_coh0 == kNegInf || (t > 0 && cross == Complex{0.0, 0.0})) {
      cond.rho_ge = {0.0, 0.0};
    } else {
      const double mag =
          std::exp(log_coh0 - 0.5 * n * (l1 + l2) +
                   (t > 0 ? t * std::log(n * std::abs(cross)) : 0.0) -
                   num::log_factorial(t) - lpt);
      cond.rho_ge = mag * polar1(coh_phase0 + t * std::arg(cross));
    }
    table.rho_given_t[i] = cond;
  }
  table.p_t.tail_bound = num::poisson_tail_bound(lam, t_max + 1);
  if (table.p_t.tail_bound > num::kTailTol)
    throw num::TruncationError("build_stat_table: tail exceeds tolerance");
  return table;
}

meas::OutcomeChannel two_outcome_channel(const StatTable& table) {
  meas::OutcomeChannel ch;
  ch.labels = {"e", "g"};
  ch.probs.weights = {0.0, 0.0};
  ch.probs.tail_bound = table.p_t.tail_bound;
  std::array<QubitState, 2> mix{QubitState{0.0, 0.0, {0.0, 0.0}},
                                QubitState{0.0, 0.0, {0.0, 0.0}}};
  for (std::size_t t = 0; t < table.size(); ++t) {
    const double pt = table.p_t[t];
    if (pt <= 0.0 || !table.rho_given_t[t]) continue;
    const std::size_t r = table.label[t] == Label::e ? 0 : 1;
    ch.probs.weights[r] += pt;
    mix[r].p_g += pt * table.rho_given_t[t]->p_g;
    mix[r].p_e += pt * table.rho_given_t[t]->p_e;
    mix[r].rho_ge += pt * table.rho_given_t[t]->rho_ge;
  }
  for (std::size_t r = 0; r < 2; ++r) {
    if (ch.probs.weights[r] > 0.0) {
      mix[r].p_g /= ch.probs.weights[r];
      mix[r].p_e /= ch.probs.weights[r];
      mix[r].rho_ge /= ch.probs.weights[r];
      ch.conditionals.emplace_back(mix[r]);
    } else {
      ch.conditionals.emplace_back(std::nullopt);
    }
  }
  return ch;
}

QubitState sequence_post_state(const SequenceSpec& spec) {
  const Complex a1 = spec.params.alpha1();
  const Complex a2 = spec.params.alpha2();
  const double n = static_cast<double>(spec.n_steps);
  const Complex exponent =
      n * (Complex{-0.5 * (std::norm(a1) + std::norm(a2)), -spec.params.phi} +
           a1 * std::conj(a2));
  QubitState post = spec.qubit;
  post.rho_ge = spec.qubit.rho_ge * std::exp(exponent);
  return post;
}

metrics::MetricsReport sequence_metrics(const SequenceSpec& spec) {
  meas::ChannelBundle bundle;
  bundle.fine = two_outcome_channel(build_stat_table(spec));
  bundle.post = sequence_post_state(spec);
  return metrics::evaluate(bundle);
}

MonteCarloResult monte_carlo_oracle(const SequenceSpec& spec, long n_samples,
                                    std::uint64_t seed) {
  spec.params.validate();
  spec.qubit.validate();
  if (!spec.params.init.is_vacuum())
    throw std::invalid_argument("monte_carlo_oracle: vacuum preparation required");
  if (n_samples < 1)
    throw std::invalid_argument("monte_carlo_oracle: n_samples < 1");

  const Complex a1 = spec.params.alpha1();
  const Complex a2 = spec.params.alpha2();
  const double l1 = std::norm(a1);
  const double l2 = std::norm(a2);
  const int n_max = num::fock_truncation(std::max(l1, l2));

  // per-branch pmf/cdf tables and the coherence update factors
  std::vector<double> pmf1(static_cast<std::size_t>(n_max) + 1);
  std::vector<double> pmf2(pmf1.size()), cdf1(pmf1.size()), cdf2(pmf1.size());
  std::vector<Complex> cross(pmf1.size());
  const Complex z = a1 * std::conj(a2);
  for (int k = 0; k <= n_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    pmf1[i] = std::exp(num::poisson_log_pmf(k, l1));
    pmf2[i] = std::exp(num::poisson_log_pmf(k, l2));
    cdf1[i] = pmf1[i] + (k > 0 ? cdf1[i - 1] : 0.0);
    cdf2[i] = pmf2[i] + (k > 0 ? cdf2[i - 1] : 0.0);
    if (z == Complex{0.0, 0.0}) {
      cross[i] = k == 0 ? std::exp(-0.5 * (l1 + l2)) : 0.0;
    } else {
      const double mag = std::exp(-0.5 * (l1 + l2) +
                                  k * std::log(std::abs(z)) -
                                  num::log_factorial(k));
      cross[i] = mag * polar1(k * std::arg(z));
    }
    cross[i] *= polar1(-spec.params.phi);
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  auto draw = [&](const std::vector<double>& cdf) {
    const double u = uniform() * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::distance(cdf.begin(), it));
  };

  std::array<long, 2> counts{0, 0};
  std::array<QubitState, 2> sums{QubitState{0.0, 0.0, {0.0, 0.0}},
                                 QubitState{0.0, 0.0, {0.0, 0.0}}};
  for (long s = 0; s < n_samples; ++s) {
    QubitState state = spec.qubit;
    for (long step = 0; step < spec.n_steps; ++step) {
      const bool ground_branch = uniform() < state.p_g;
      const int k = draw(ground_branch ? cdf1 : cdf2);
      const auto i = static_cast<std::size_t>(k);
      const double wg = state.p_g * pmf1[i];
      const double we = state.p_e * pmf2[i];
      const double pn = wg + we;
      state.p_g = wg / pn;
      state.p_e = we / pn;
      state.rho_ge = state.rho_ge * cross[i] / pn;
    }
    const std::size_t r = state.p_e > state.p_g ? 0 : 1;  // ties resolve to g
    counts[r] += 1;
    sums[r].p_g += state.p_g;
    sums[r].p_e += state.p_e;
    sums[r].rho_ge += state.rho_ge;
  }

  MonteCarloResult res;
  res.p_outcome_e = static_cast<double>(counts[0]) / n_samples;
  res.p_outcome_g = static_cast<double>(counts[1]) / n_samples;
  res.se_p = std::sqrt(res.p_outcome_e * res.p_outcome_g /
                       static_cast<double>(n_samples));
  res.channel.labels = {"e", "g"};
  res.channel.probs.weights = {res.p_outcome_e, res.p_outcome_g};
  meas::ChannelBundle bundle;
  bundle.post = QubitState{0.0, 0.0, {0.0, 0.0}};
  for (std::size_t r = 0; r < 2; ++r) {
    if (counts[r] > 0) {
      QubitState mean = sums[r];
      mean.p_g /= static_cast<double>(counts[r]);
      mean.p_e /= static_cast<double>(counts[r]);
      mean.rho_ge /= static_cast<double>(counts[r]);
      res.channel.conditionals.emplace_back(mean);
      bundle.post.p_g += res.channel.probs[r] * mean.p_g;
      bundle.post.p_e += res.channel.probs[r] * mean.p_e;
      bundle.post.rho_ge += res.channel.probs[r] * mean.rho_ge;
    } else {
      res.channel.conditionals.emplace_back(std::nullopt);
    }
  }
  bundle.fine = res.channel;
  res.report = metrics::evaluate(bundle);
  return res;
}

double total_work_sequence(const SequenceSpec& spec) {
  if (!spec.params.init.is_vacuum())
    throw std::invalid_argument("total_work_sequence: vacuum preparation required");
  const auto probs = meas::outcome_probabilities(spec.params, spec.qubit);
  const double h_pn = num::shannon_entropy(probs).nats();
  const double per_step =
      thermo::work_bound_dephasing(h_pn, 0.0, 0.0, spec.params.beta);
  return static_cast<double>(spec.n_steps) * per_step;
}

ScalingPrediction scaling_predictions(const ScalingModel& model, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("scaling_predictions: eps <= 0");
  ScalingPrediction p;
  p.w_weak_shape = model.h0 / (eps * eps);
  p.w_strong = model.k_outcomes *
               (model.l_exponent * std::log(2.0 * M_PI * eps) + 0.5);
  return p;
}

double fit_weak_coefficient(std::span<const double> eps,
                            std::span<const double> w_measured, double h0) {
  if (eps.size() != w_measured.size() || eps.size() < 2)
    throw std::invalid_argument("fit_weak_coefficient: need >= 2 points");
  if (!(h0 > 0.0)) throw std::domain_error("fit_weak_coefficient: h0 <= 0");
  std::vector<std::size_t> order(eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
  double coeff = 0.0;
  for (int k = 0; k < 2; ++k) {
    const std::size_t i = order[static_cast<std::size_t>(k)];
    coeff += w_measured[i] * eps[i] * eps[i] / h0;
  }
  return coeff / 2.0;
}

NStarResult find_n_star(const MeasurementParams& params, const QubitState& qubit,
                        const Thresholds& thresholds) {
  const double eps2 = std::norm(params.epsilon);
  if (eps2 <= 0.0) throw std::domain_error("find_n_star: epsilon must be nonzero");
  const long n_bound = static_cast<long>(std::ceil(20.0 / eps2));

  auto meets = [&](long n) {
    SequenceSpec spec;
    spec.n_steps = n;
    spec.params = params;
    spec.qubit = qubit;
    const auto rep = sequence_metrics(spec);
    return rep.xi >= thresholds.xi && rep.eta && *rep.eta >= thresholds.eta &&
           rep.eta_xr && *rep.eta_xr >= thresholds.eta_xr;
  };

  NStarResult res;
  res.n_searched_max = n_bound;
  long lo = 0;  // highest N known to fail
  long hi = 1;
  while (hi <= n_bound && !meets(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi > n_bound) {
    if (lo < n_bound && meets(n_bound)) {
      hi = n_bound;
    } else {
      return res;  // not converged within the bound
    }
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (meets(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.n_star = hi;
  return res;
}

}  // namespace qmeter::seq

#include "qmeter/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qmeter::num {

namespace {

constexpr int kFactorialTableSize = 257;

std::array<double, kFactorialTableSize> build_log_factorial_table() {
  std::array<double, kFactorialTableSize> table{};
  long double acc = 0.0L;
  table[0] = 0.0;
  for (int n = 1; n < kFactorialTableSize; ++n) {
    acc += std::log(static_cast<long double>(n));
    table[n] = static_cast<double>(acc);
  }
  return table;
}

const std::array<double, kFactorialTableSize>& log_factorial_table() {
  static const auto table = build_log_factorial_table();
  return table;
}

}  // namespace

void ProbVector::validate(double tol) const {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::domain_error("ProbVector: negative weight");
    sum += w;
  }
  if (tail_bound < 0.0 || tail_bound > kTailTol * 10)
    throw TruncationError("ProbVector: tail bound out of certified range");
  if (sum > 1.0 + tol || sum < 1.0 - tail_bound - tol)
    throw TruncationError("ProbVector: mass inconsistent with tail bound");
}

double stable_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: n < 0");
  const auto& table = log_factorial_table();
  if (n < kFactorialTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double assoc_laguerre(int m, int k, double x) {
  if (m < 0) throw std::domain_error("assoc_laguerre: m < 0");
  if (x < 0.0) throw std::domain_error("assoc_laguerre: x < 0");
  if (m == 0) return 1.0;
  double prev = 1.0;                    // L_0
  double curr = 1.0 + k - x;            // L_1
  for (int j = 1; j < m; ++j) {
    double next = ((2.0 * j + k + 1.0 - x) * curr - (j + k) * prev) / (j + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

double poisson_log_pmf(int n, double lambda) {
  if (n < 0) throw std::domain_error("poisson_log_pmf: n < 0");
  if (lambda < 0.0) throw std::domain_error("poisson_log_pmf: lambda < 0");
  if (lambda == 0.0)
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return n * std::log(lambda) - lambda - log_factorial(n);
}

int fock_truncation(double lambda) {
  if (lambda < 0.0) throw std::domain_error("fock_truncation: lambda < 0");
  return static_cast<int>(std::ceil(lambda + 10.0 * std::sqrt(lambda))) + 25;
}

double poisson_tail_bound(double lambda, int a) {
  if (lambda == 0.0) return 0.0;
  if (a <= lambda) return 1.0;
  // P(X >= a) <= exp(-lambda) (e lambda / a)^a
  return std::exp(-lambda + a * (1.0 + std::log(lambda) - std::log(static_cast<double>(a))));
}

ProbVector poisson_weights(double lambda) {
  const int n_max = fock_truncation(lambda);
  ProbVector p;
  p.weights.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    p.weights[static_cast<std::size_t>(n)] = std::exp(poisson_log_pmf(n, lambda));
  p.tail_bound = poisson_tail_bound(lambda, n_max + 1);
  if (p.tail_bound > kTailTol)
    throw TruncationError("poisson_weights: certified tail exceeds tolerance");
  return p;
}

Entropy shannon_entropy(const ProbVector& p, EntropyBase base) {
  std::vector<double> terms;
  terms.reserve(p.weights.size());
  for (double w : p.weights) {
    if (w < 0.0) throw std::domain_error("shannon_entropy: negative weight");
    terms.push_back(w > 0.0 ? -w * std::log(w) : 0.0);
  }
  double h = stable_sum(terms);
  h = std::max(h, 0.0);
  if (base == EntropyBase::two) return {h / kLogTwo, base};
  return {h, base};
}

QubitSpectrum qubit_spectrum(double p_g, double p_e, std::complex<double> rho_ge) {
  const double diff = p_g - p_e;
  const double disc = std::sqrt(diff * diff + 4.0 * std::norm(rho_ge));
  return {0.5 * (p_g + p_e + disc), 0.5 * (p_g + p_e - disc)};
}

Entropy vn_entropy_2x2(double p_g, double p_e, std::complex<double> rho_ge,
                       EntropyBase base) {
  constexpr double kPsdTol = 1e-9;
  if (p_g < -kPsdTol || p_e < -kPsdTol)
    throw std::domain_error("vn_entropy_2x2: negative population");
  if (std::abs(p_g + p_e - 1.0) > 1e-6)
    throw std::domain_error("vn_entropy_2x2: trace != 1");
  auto [hi, lo] = qubit_spectrum(p_g, p_e, rho_ge);
  if (lo < -kPsdTol) throw std::domain_error("vn_entropy_2x2: not PSD");
  lo = std::max(lo, 0.0);
  hi = std::max(hi, 0.0);
  double h = 0.0;
  if (lo > 0.0) h -= lo * std::log(lo);
  if (hi > 0.0) h -= hi * std::log(hi);
  h = std::max(h, 0.0);
  if (base == EntropyBase::two) return {h / kLogTwo, base};
  return {h, base};
}

}  // namespace qmeter::num

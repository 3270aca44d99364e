#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmeter::num {

inline constexpr double kLogTwo = 0.6931471805599453094;

/// Certified truncation tolerance used by every Fock-support distribution.
inline constexpr double kTailTol = 1e-10;

/// Raised when a truncated representation cannot certify its tail mass.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EntropyBase { natural, two };

/// An entropy value tagged with its logarithm base. Conversion between
/// bases is exact up to one multiplication by ln 2.
struct Entropy {
  double value = 0.0;
  EntropyBase base = EntropyBase::natural;

  double nats() const {
    return base == EntropyBase::natural ? value : value * kLogTwo;
  }
  double bits() const {
    return base == EntropyBase::two ? value : value / kLogTwo;
  }
};

/// Nonnegative weights summing to 1 minus a certified tail beyond the
/// truncation point.
struct ProbVector {
  std::vector<double> weights;
  double tail_bound = 0.0;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }

  /// Throws std::domain_error on a negative weight, TruncationError when
  /// the mass accounting is inconsistent with tail_bound.
  void validate(double tol = 1e-9) const;
};

/// Compensated (Neumaier) summation.
double stable_sum(std::span<const double> xs);

/// ln(n!) from a cumulative table for small n, lgamma above.
/// Relative error <= 1e-12 over the supported range.
double log_factorial(int n);

/// Associated Laguerre polynomial L_m^k(x) via the three-term upward
/// recurrence in the degree m. Requires m >= 0, x >= 0.
double assoc_laguerre(int m, int k, double x);

/// log of the Poisson pmf at n for intensity lambda (lambda >= 0).
double poisson_log_pmf(int n, double lambda);

/// Truncation point n_max = ceil(lambda + 10 sqrt(lambda)) + 25.
int fock_truncation(double lambda);

/// Chernoff bound on the upper Poisson tail P(X >= a), valid for a > lambda.
double poisson_tail_bound(double lambda, int a);

/// Poisson weights for n = 0..fock_truncation(lambda) with a certified tail.
/// Throws TruncationError if the certified tail exceeds kTailTol.
ProbVector poisson_weights(double lambda);

/// -sum p_i log p_i with 0 log 0 = 0. Negative weight -> std::domain_error.
Entropy shannon_entropy(const ProbVector& p, EntropyBase base = EntropyBase::natural);

/// Closed-form eigenvalues of a qubit density matrix,
/// (1 +- sqrt((p_g - p_e)^2 + 4 |rho_ge|^2)) / 2.
struct QubitSpectrum {
  double hi = 0.0;
  double lo = 0.0;
};
QubitSpectrum qubit_spectrum(double p_g, double p_e, std::complex<double> rho_ge);

/// Von Neumann entropy of a 2x2 density matrix given populations and
/// coherence. Throws std::domain_error if the matrix is not PSD within
/// tolerance.
Entropy vn_entropy_2x2(double p_g, double p_e, std::complex<double> rho_ge,
                       EntropyBase base = EntropyBase::natural);

}  // namespace qmeter::num

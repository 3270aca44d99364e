#include "qmeter/fock.hpp"

#include <cmath>

namespace qmeter::fock {

using num::TruncationError;

num::ProbVector thermal_weights(double beta_omega, double tol) {
  if (!(beta_omega > 0.0))
    throw std::domain_error("thermal_weights: beta*omega must be positive");
  const double q = std::exp(-beta_omega);
  const int count = static_cast<int>(std::ceil(-std::log(tol) / beta_omega)) + 1;
  num::ProbVector p;
  p.weights.resize(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m)
    p.weights[static_cast<std::size_t>(m)] = (1.0 - q) * std::pow(q, m);
  p.tail_bound = std::pow(q, count);  // exact geometric tail
  return p;
}

double thermal_entropy(double beta_omega) {
  if (!(beta_omega > 0.0))
    throw std::domain_error("thermal_entropy: beta*omega must be positive");
  const double q = std::exp(-beta_omega);
  const double n_bar = q / (1.0 - q);
  return -std::log1p(-q) + beta_omega * n_bar;
}

int joint_dimension(const MeasurementParams& params) {
  const double a = std::max(std::abs(params.alpha1()), std::abs(params.alpha2()));
  double reach = a;
  if (!params.init.is_vacuum()) {
    const auto w = thermal_weights(params.init.beta_omega);
    reach += std::sqrt(static_cast<double>(w.size()));
  }
  return num::fock_truncation(reach * reach) + 1;
}

Complex displacement_element(int n, int m, Complex alpha) {
  if (n < 0 || m < 0)
    throw std::out_of_range("displacement_element: negative index");
  if (alpha == Complex{0.0, 0.0}) return n == m ? 1.0 : 0.0;
  if (n < m) return std::conj(displacement_element(m, n, -alpha));
  const double x = std::norm(alpha);
  const int k = n - m;
  // log-space prefactor keeps sqrt(m!/n!) alpha^{n-m} from underflowing
  const double log_mag = 0.5 * (num::log_factorial(m) - num::log_factorial(n)) +
                         k * std::log(std::abs(alpha)) - 0.5 * x;
  const double lag = num::assoc_laguerre(m, k, x);
  const double phase = k * std::arg(alpha);
  return lag * std::exp(log_mag) * Complex{std::cos(phase), std::sin(phase)};
}

Matrix displacement_matrix(Complex alpha, int dim) {
  Matrix d(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) d(n, m) = displacement_element(n, m, alpha);
  return d;
}

Vector coherent_vector(Complex alpha, int dim) {
  Vector v(dim);
  for (int n = 0; n < dim; ++n) v(n) = displacement_element(n, 0, alpha);
  return v;
}

JointState build_joint_predephasing(const MeasurementParams& params,
                                    const QubitState& qubit) {
  params.validate();
  qubit.validate();

  const int dim = joint_dimension(params);
  const Complex a1 = params.alpha1();
  const Complex a2 = params.alpha2();

  num::ProbVector source;
  if (params.init.is_vacuum()) {
    source.weights = {1.0};
    source.tail_bound = 0.0;
  } else {
    source = thermal_weights(params.init.beta_omega);
  }

  JointState j;
  j.dim = dim;
  j.gg = Matrix::Zero(dim, dim);
  j.ge = Matrix::Zero(dim, dim);
  j.ee = Matrix::Zero(dim, dim);

  const Complex ge0 = qubit.rho_ge *
                      Complex{std::cos(params.phi), -std::sin(params.phi)};

  // D rho_A D^dag with diagonal rho_A is a weighted sum of rank-1 terms
  // built from the displacement columns.
  for (std::size_t m = 0; m < source.size(); ++m) {
    const double w = source[m];
    Vector d1(dim), d2(dim);
    for (int n = 0; n < dim; ++n) {
      d1(n) = displacement_element(n, static_cast<int>(m), a1);
      d2(n) = displacement_element(n, static_cast<int>(m), a2);
    }
    j.gg.noalias() += (qubit.p_g * w) * (d1 * d1.adjoint());
    j.ge.noalias() += (ge0 * w) * (d1 * d2.adjoint());
    j.ee.noalias() += (qubit.p_e * w) * (d2 * d2.adjoint());
  }
  j.eg = j.ge.adjoint();

  const double deficit = std::max(0.0, 1.0 - j.trace());
  j.tail_bound = deficit + source.tail_bound;
  if (j.tail_bound > num::kTailTol)
    throw TruncationError("build_joint_predephasing: certified tail exceeds tolerance");
  return j;
}

JointState dephase(const JointState& joint) {
  JointState out;
  out.dim = joint.dim;
  out.tail_bound = joint.tail_bound;
  out.dephased = true;
  out.gg = joint.gg.diagonal().asDiagonal();
  out.ge = joint.ge.diagonal().asDiagonal();
  out.eg = joint.eg.diagonal().asDiagonal();
  out.ee = joint.ee.diagonal().asDiagonal();
  return out;
}

namespace {

// B -> R B R^dag with R the real pair rotation; rows then columns, O(dim^2).
void rotate_block(Matrix& b, double c, double s) {
  const int dim = static_cast<int>(b.rows());
  for (int a = 0; a + 1 < dim; a += 2) {
    Eigen::RowVectorXcd ra = b.row(a);
    b.row(a) = c * ra - s * b.row(a + 1);
    b.row(a + 1) = s * ra + c * b.row(a + 1);
  }
  for (int a = 0; a + 1 < dim; a += 2) {
    Vector ca = b.col(a);
    b.col(a) = c * ca - s * b.col(a + 1);
    b.col(a + 1) = s * ca + c * b.col(a + 1);
  }
}

}  // namespace

JointState rotate_pairs(const JointState& joint, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  JointState out = joint;
  rotate_block(out.gg, c, s);
  rotate_block(out.ge, c, s);
  rotate_block(out.eg, c, s);
  rotate_block(out.ee, c, s);
  return out;
}

}  // namespace qmeter::fock

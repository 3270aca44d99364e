#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qmeter/numerics.hpp"
#include "qmeter/states.hpp"

namespace qmeter::fock {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Qubit (x) Fock state stored as four Fock-indexed blocks. The eg block is
/// the conjugate transpose of ge by construction, kept explicit so block
/// operations stay uniform.
struct JointState {
  int dim = 0;
  Matrix gg, ge, eg, ee;
  double tail_bound = 0.0;
  bool dephased = false;

  double trace() const { return (gg.trace() + ee.trace()).real(); }
};

/// Geometric weights (1 - q) q^m, q = e^{-beta omega}, truncated so the exact
/// geometric tail is below tol.
num::ProbVector thermal_weights(double beta_omega, double tol = 1e-13);

/// Exact entropy of the geometric distribution, in nats.
double thermal_entropy(double beta_omega);

/// Fock-space dimension certified for displacements up to |alpha| on top of
/// the given ancilla preparation.
int joint_dimension(const MeasurementParams& params);

/// <n|D(alpha)|m> for the unitary displacement D = exp(alpha a^dag - alpha^* a),
/// via the Laguerre closed form with log-factorial stabilization. For n >= m:
///   sqrt(m!/n!) alpha^{n-m} e^{-|alpha|^2/2} L_m^{n-m}(|alpha|^2),
/// and the n < m case follows from D(alpha)^dag = D(-alpha).
Complex displacement_element(int n, int m, Complex alpha);

/// Dense truncated D(alpha); unitary on the certified interior sub-block.
Matrix displacement_matrix(Complex alpha, int dim);

/// Amplitudes of D(alpha)|0>, i.e. the coherent state |alpha>.
Vector coherent_vector(Complex alpha, int dim);

/// Joint qubit-ancilla state after the conditional displacement, before
/// dephasing: gg = p_g0 D(a1) rho_A D(a1)^dag, ge = rho_ge0 e^{-i phi}
/// D(a1) rho_A D(a2)^dag, ee = p_e0 D(a2) rho_A D(a2)^dag, with rho_A from
/// the ancilla preparation. Throws TruncationError when the certified tail
/// exceeds tolerance.
JointState build_joint_predephasing(const MeasurementParams& params,
                                    const QubitState& qubit);

/// Full dephasing in the Fock basis: every block keeps only its diagonal.
/// Idempotent; preserves block traces exactly.
JointState dephase(const JointState& joint);

/// Pair rotation |2n> -> cos t |2n> + sin t |2n+1>,
/// |2n+1> -> cos t |2n+1> - sin t |2n>, applied on the ancilla index of every
/// block (last level fixed when dim is odd). Intended before dephase.
JointState rotate_pairs(const JointState& joint, double theta);

}  // namespace qmeter::fock

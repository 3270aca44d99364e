#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qmeter {

using Complex = std::complex<double>;

/// Qubit density matrix in the (g, e) energy basis: populations plus one
/// complex coherence (rho_eg is implied by conjugation).
struct QubitState {
  double p_g = 1.0;
  double p_e = 0.0;
  Complex rho_ge{0.0, 0.0};

  Complex rho_eg() const { return std::conj(rho_ge); }

  void validate(double tol = 1e-9) const {
    if (std::abs(p_g + p_e - 1.0) > tol)
      throw std::domain_error("QubitState: populations do not sum to 1");
    if (p_g < -tol || p_e < -tol)
      throw std::domain_error("QubitState: negative population");
    if (std::norm(rho_ge) > p_g * p_e + tol)
      throw std::domain_error("QubitState: coherence violates positivity");
  }

  /// (|g> + |e>)/sqrt(2), the maximal-uncertainty input for the energy
  /// observable.
  static QubitState reference() { return {0.5, 0.5, Complex{0.5, 0.0}}; }

  static QubitState ground() { return {1.0, 0.0, Complex{0.0, 0.0}}; }
  static QubitState excited() { return {0.0, 1.0, Complex{0.0, 0.0}}; }
};

/// Initial ancilla preparation: vacuum or a thermal state of the oscillator
/// at a given beta * omega_a product.
struct AncillaInit {
  enum class Kind { vacuum, thermal };

  Kind kind = Kind::vacuum;
  double beta_omega = 0.0;  // used when kind == thermal

  static AncillaInit vacuum() { return {Kind::vacuum, 0.0}; }
  static AncillaInit thermal(double beta_omega) {
    if (beta_omega <= 0.0)
      throw std::domain_error("AncillaInit: thermal requires beta*omega > 0");
    return {Kind::thermal, beta_omega};
  }

  bool is_vacuum() const { return kind == Kind::vacuum; }

  /// Mean occupation 1/(e^{beta omega} - 1); zero for vacuum.
  double n_bar() const {
    if (kind == Kind::vacuum) return 0.0;
    return 1.0 / std::expm1(beta_omega);
  }
};

/// Model knobs of the measurement channel. The net displacements applied
/// conditionally on the qubit state are alpha1 = alpha_bar + epsilon (ground)
/// and alpha2 = alpha_bar - epsilon (excited).
struct MeasurementParams {
  Complex alpha_bar{0.0, 0.0};
  Complex epsilon{0.0, 0.0};
  double phi = 0.0;      // net phase on the ge block
  double beta = 1.0;     // environment inverse temperature (work unit 1/beta)
  double omega_a = 1.0;  // oscillator frequency
  double omega_q = 0.0;  // qubit frequency; never enters computed numbers
  AncillaInit init = AncillaInit::vacuum();

  Complex alpha1() const { return alpha_bar + epsilon; }
  Complex alpha2() const { return alpha_bar - epsilon; }

  void validate() const {
    if (!(beta > 0.0)) throw std::domain_error("MeasurementParams: beta <= 0");
    if (!(omega_a > 0.0))
      throw std::domain_error("MeasurementParams: omega_a <= 0");
    if (!std::isfinite(std::abs(alpha1())) || !std::isfinite(std::abs(alpha2())))
      throw std::domain_error("MeasurementParams: non-finite displacement");
  }
};

}  // namespace qmeter

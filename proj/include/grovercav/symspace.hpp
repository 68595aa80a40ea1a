#pragma once

// Exact linear algebra on the (N+1)-dimensional permutation-symmetric
// subspace of N qubits. Basis vector m is the Dicke state with m qubits in |1>.

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grovercav/errors.hpp"

namespace grovercav {

using cplx = std::complex<double>;

// Pure state in the Dicke basis. Always unit norm.
class SymmetricState {
 public:
  // Throws DomainError if amps.size() != n_qubits + 1 or the norm is off by
  // more than 1e-9.
  SymmetricState(int n_qubits, Eigen::VectorXcd amps);

  // Rescales amps to unit norm first. Throws on zero vectors.
  static SymmetricState normalized(int n_qubits, Eigen::VectorXcd amps);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return n_qubits_ + 1; }
  const Eigen::VectorXcd& amps() const { return amps_; }
  cplx operator[](int m) const { return amps_(m); }

  double norm() const { return amps_.norm(); }
  // <this|other>
  cplx inner(const SymmetricState& other) const;

  SymmetricState operator-() const { return {n_qubits_, -amps_}; }

 private:
  int n_qubits_;
  Eigen::VectorXcd amps_;
};

// Density matrix on the symmetric subspace. Trace may drop below one after
// lossy maps; it is never renormalized implicitly.
class SymDensityMatrix {
 public:
  SymDensityMatrix(int n_qubits, Eigen::MatrixXcd mat);
  static SymDensityMatrix from_pure(const SymmetricState& s);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return n_qubits_ + 1; }
  const Eigen::MatrixXcd& mat() const { return mat_; }

  double trace() const { return mat_.trace().real(); }
  // <s|rho|s>
  double expectation(const SymmetricState& s) const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  int n_qubits_;
  Eigen::MatrixXcd mat_;
};

// Collective rotation R(phi)^{\otimes N} about y, restricted to the symmetric
// subspace. Convention: R(phi)|m=0> equals css_state(N, phi), i.e. the
// single-qubit map |0> -> cos(phi/2)|0> + sin(phi/2)|1>.
class RotationMatrix {
 public:
  RotationMatrix(int n_qubits, double angle, Eigen::MatrixXd mat)
      : n_qubits_(n_qubits), angle_(angle), mat_(std::move(mat)) {}

  int n_qubits() const { return n_qubits_; }
  double angle() const { return angle_; }
  const Eigen::MatrixXd& mat() const { return mat_; }

  SymmetricState apply(const SymmetricState& s) const;
  // R rho R^T
  SymDensityMatrix conjugate(const SymDensityMatrix& rho) const;

 private:
  int n_qubits_;
  double angle_;
  Eigen::MatrixXd mat_;
};

SymmetricState dicke(int n_qubits, int m);

// Product state [cos(phi/2)|0> + sin(phi/2)|1>]^{\otimes N}.
SymmetricState css_state(int n_qubits, double phi);

// log sqrt(C(n, m))
double log_sqrt_binomial(int n, int m);

RotationMatrix rotation_matrix(int n_qubits, double phi);
SymmetricState apply_rotation(const SymmetricState& s, double phi);

// Ideal chi_m: negates the Dicke-m amplitude.
SymmetricState phase_flip(const SymmetricState& s, int m);

// (1 - 2|a><a|) s
SymmetricState reflection_about(const SymmetricState& s, const SymmetricState& a);

// (|0...0> + sign |1...1>)/sqrt(2)
SymmetricState ghz_state(int n_qubits, int sign);

struct QGrid {
  std::vector<double> betas;    // polar angle samples
  std::vector<double> phi_azs;  // azimuth samples
  // values[i][j] at (betas[i], phi_azs[j]); max-normalized to 1
  std::vector<std::vector<double>> values;
};

// Q(beta, phi_az) = |<s|CSS(beta, phi_az)>|^2, normalized by its maximum.
QGrid husimi_q(const SymmetricState& s, std::span<const double> betas,
               std::span<const double> phi_azs);
// n_beta points on [0, pi] (both ends) and n_phi points on [0, 2 pi).
QGrid husimi_q(const SymmetricState& s, int n_beta, int n_phi);

// CSV "beta,phi_az,q", one row per grid point, beta-major.
void write_qgrid_csv(std::ostream& os, const QGrid& grid);

}  // namespace grovercav

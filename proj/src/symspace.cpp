#include "grovercav/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "grovercav/io.hpp"

namespace grovercav {

namespace {

constexpr double kFlushBelow = 1e-300;

void check_index(int n_qubits, int m, const char* what) {
  if (m < 0 || m > n_qubits) {
    throw DomainError(std::string(what) + ": Dicke index " + std::to_string(m) +
                      " outside [0, " + std::to_string(n_qubits) + "]");
  }
}

void check_qubits(int n_qubits) {
  if (n_qubits < 1) {
    throw DomainError("number of qubits must be >= 1, got " + std::to_string(n_qubits));
  }
}

// Sign and log-magnitude of sqrt(C(n,m)) x^(n-m) y^m.
struct LogValue {
  double sign = 0.0;
  double log_abs = -INFINITY;
};

LogValue binomial_term(int n, int m, double x, double y) {
  LogValue v;
  double sign = 1.0;
  double log_abs = log_sqrt_binomial(n, m);
  if (n - m > 0) {
    if (x == 0.0) return v;
    log_abs += (n - m) * std::log(std::abs(x));
    if (x < 0 && (n - m) % 2 == 1) sign = -sign;
  }
  if (m > 0) {
    if (y == 0.0) return v;
    log_abs += m * std::log(std::abs(y));
    if (y < 0 && m % 2 == 1) sign = -sign;
  }
  v.sign = sign;
  v.log_abs = log_abs;
  return v;
}

double exp_flushed(const LogValue& v) {
  if (v.sign == 0.0) return 0.0;
  const double mag = std::exp(v.log_abs);
  return mag < kFlushBelow ? 0.0 : v.sign * mag;
}

// Column `col` of the rotation matrix, by three-term recurrence of the
// eigen-equation (cos(phi) Jz - sin(phi) Jx) v = (col - N/2) v. The first
// and last entries are known in closed form; recursion runs inward from both
// ends and switches over at the first magnitude maximum seen from the top,
// so each side only recurs in its growing direction.
void rotation_column(int n, int col, double c, double s, double cos_phi, double sin_phi,
                     Eigen::Ref<Eigen::VectorXd> out) {
  const double j = 0.5 * n;
  const double mu = col - j;
  const double half_sin = 0.5 * sin_phi;
  auto coupling = [n](int p) { return std::sqrt(double(p) * double(n - p + 1)); };

  const LogValue first = binomial_term(n, col, c, -s);  // R[0][col]
  const LogValue last = binomial_term(n, col, s, c);    // R[N][col]

  std::vector<double> w(n + 1, 0.0);
  std::vector<double> scale(n + 1, 0.0);

  // Downward from p = N.
  int p_top = n;
  if (last.sign != 0.0) {
    double s_cur = last.log_abs;
    double w_hi = 0.0;  // w_{p+1}
    double w_p = last.sign;
    w[n] = w_p;
    scale[n] = s_cur;
    p_top = 0;
    for (int p = n; p >= 1; --p) {
      const double diag = cos_phi * (p - j) - mu;
      const double up = p < n ? half_sin * coupling(p + 1) : 0.0;
      double w_lo = (diag * w_p - up * w_hi) / (half_sin * coupling(p));
      if (std::abs(w_lo) < std::abs(w_p)) {
        p_top = p;
        break;
      }
      w[p - 1] = w_lo;
      scale[p - 1] = s_cur;
      const double mx = std::max(std::abs(w_lo), std::abs(w_p));
      if (mx > 1e50 || mx < 1e-50) {
        w_lo /= mx;
        w_p /= mx;
        s_cur += std::log(mx);
      }
      w_hi = w_p;
      w_p = w_lo;
    }
  }

  // Upward from p = 0 to p_top - 1.
  if (p_top > 0) {
    if (first.sign == 0.0) {
      throw NumericalError("rotation_matrix: both recursion anchors vanish");
    }
    double s_cur = first.log_abs;
    double w_lo = 0.0;  // w_{p-1}
    double w_p = first.sign;
    w[0] = w_p;
    scale[0] = s_cur;
    for (int p = 0; p + 1 < p_top; ++p) {
      const double diag = cos_phi * (p - j) - mu;
      const double down = p > 0 ? half_sin * coupling(p) : 0.0;
      double w_hi = (diag * w_p - down * w_lo) / (half_sin * coupling(p + 1));
      w[p + 1] = w_hi;
      scale[p + 1] = s_cur;
      const double mx = std::max(std::abs(w_hi), std::abs(w_p));
      if (mx > 1e50 || mx < 1e-50) {
        w_hi /= mx;
        w_p /= mx;
        s_cur += std::log(mx);
      }
      w_lo = w_p;
      w_p = w_hi;
    }
  }

  for (int p = 0; p <= n; ++p) {
    if (w[p] == 0.0) {
      out(p) = 0.0;
      continue;
    }
    const LogValue v{w[p] < 0 ? -1.0 : 1.0, std::log(std::abs(w[p])) + scale[p]};
    out(p) = exp_flushed(v);
  }
}

}  // namespace

// ---- SymmetricState -------------------------------------------------------

SymmetricState::SymmetricState(int n_qubits, Eigen::VectorXcd amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {
  check_qubits(n_qubits);
  if (amps_.size() != n_qubits + 1) {
    throw DomainError("SymmetricState: expected " + std::to_string(n_qubits + 1) +
                      " amplitudes, got " + std::to_string(amps_.size()));
  }
  if (std::abs(amps_.norm() - 1.0) > 1e-9) {
    throw DomainError("SymmetricState: amplitudes not normalized (norm " +
                      format_double(amps_.norm()) + ")");
  }
}

SymmetricState SymmetricState::normalized(int n_qubits, Eigen::VectorXcd amps) {
  const double nrm = amps.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw DomainError("SymmetricState: cannot normalize a zero or non-finite vector");
  }
  amps /= nrm;
  return {n_qubits, std::move(amps)};
}

cplx SymmetricState::inner(const SymmetricState& other) const {
  if (other.n_qubits_ != n_qubits_) {
    throw DomainError("inner product between states of different qubit number");
  }
  return amps_.dot(other.amps_);  // conjugates the left operand
}

// ---- SymDensityMatrix -----------------------------------------------------

SymDensityMatrix::SymDensityMatrix(int n_qubits, Eigen::MatrixXcd mat)
    : n_qubits_(n_qubits), mat_(std::move(mat)) {
  check_qubits(n_qubits);
  if (mat_.rows() != n_qubits + 1 || mat_.cols() != n_qubits + 1) {
    throw DomainError("SymDensityMatrix: expected a square matrix of size " +
                      std::to_string(n_qubits + 1));
  }
}

SymDensityMatrix SymDensityMatrix::from_pure(const SymmetricState& s) {
  return {s.n_qubits(), s.amps() * s.amps().adjoint()};
}

double SymDensityMatrix::expectation(const SymmetricState& s) const {
  if (s.n_qubits() != n_qubits_) {
    throw DomainError("expectation: qubit number mismatch");
  }
  return s.amps().dot(mat_ * s.amps()).real();
}

double SymDensityMatrix::hermiticity_error() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double SymDensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (mat_ + mat_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---- RotationMatrix -------------------------------------------------------

SymmetricState RotationMatrix::apply(const SymmetricState& s) const {
  if (s.n_qubits() != n_qubits_) {
    throw DomainError("apply_rotation: state has " + std::to_string(s.n_qubits()) +
                      " qubits, rotation has " + std::to_string(n_qubits_));
  }
  Eigen::VectorXcd out = mat_.cast<cplx>() * s.amps();
  return {n_qubits_, std::move(out)};
}

SymDensityMatrix RotationMatrix::conjugate(const SymDensityMatrix& rho) const {
  if (rho.n_qubits() != n_qubits_) {
    throw DomainError("rotation conjugation: qubit number mismatch");
  }
  const Eigen::MatrixXcd r = mat_.cast<cplx>();
  return {n_qubits_, r * rho.mat() * r.transpose()};
}

// ---- free functions -------------------------------------------------------

double log_sqrt_binomial(int n, int m) {
  return 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
}

SymmetricState dicke(int n_qubits, int m) {
  check_qubits(n_qubits);
  check_index(n_qubits, m, "dicke");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n_qubits + 1);
  amps(m) = 1.0;
  return {n_qubits, std::move(amps)};
}

SymmetricState css_state(int n_qubits, double phi) {
  check_qubits(n_qubits);
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  Eigen::VectorXcd amps(n_qubits + 1);
  if (n_qubits <= 60) {
    double binom = 1.0;  // C(N, m), exact in double up to N = 60 within one ulp
    for (int m = 0; m <= n_qubits; ++m) {
      amps(m) = std::sqrt(binom) * std::pow(c, n_qubits - m) * std::pow(s, m);
      binom = binom * (n_qubits - m) / (m + 1);
    }
  } else {
    for (int m = 0; m <= n_qubits; ++m) {
      amps(m) = exp_flushed(binomial_term(n_qubits, m, c, s));
    }
  }
  return SymmetricState::normalized(n_qubits, std::move(amps));
}

RotationMatrix rotation_matrix(int n_qubits, double phi) {
  check_qubits(n_qubits);
  const int dim = n_qubits + 1;
  // R(4 pi) = identity on every qubit.
  const double phi_r = std::remainder(phi, 4.0 * std::numbers::pi);
  if (std::abs(phi_r) < 1e-100) {
    return {n_qubits, phi, Eigen::MatrixXd::Identity(dim, dim)};
  }
  const double c = std::cos(0.5 * phi_r);
  const double s = std::sin(0.5 * phi_r);
  const double cos_phi = std::cos(phi_r);
  const double sin_phi = std::sin(phi_r);

  Eigen::MatrixXd mat(dim, dim);
  for (int col = 0; col < dim; ++col) {
    rotation_column(n_qubits, col, c, s, cos_phi, sin_phi, mat.col(col));
  }
  return {n_qubits, phi, std::move(mat)};
}

SymmetricState apply_rotation(const SymmetricState& s, double phi) {
  return rotation_matrix(s.n_qubits(), phi).apply(s);
}

SymmetricState phase_flip(const SymmetricState& s, int m) {
  check_index(s.n_qubits(), m, "phase_flip");
  Eigen::VectorXcd amps = s.amps();
  amps(m) = -amps(m);
  return {s.n_qubits(), std::move(amps)};
}

SymmetricState reflection_about(const SymmetricState& s, const SymmetricState& a) {
  if (s.n_qubits() != a.n_qubits()) {
    throw DomainError("reflection_about: qubit number mismatch");
  }
  if (std::abs(a.norm() - 1.0) > 1e-9) {
    throw DomainError("reflection_about: reflection axis is not normalized");
  }
  Eigen::VectorXcd out = s.amps() - 2.0 * a.inner(s) * a.amps();
  return {s.n_qubits(), std::move(out)};
}

SymmetricState ghz_state(int n_qubits, int sign) {
  check_qubits(n_qubits);
  if (sign != 1 && sign != -1) {
    throw DomainError("ghz_state: sign must be +1 or -1");
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n_qubits + 1);
  amps(0) = std::numbers::sqrt2 / 2.0;
  amps(n_qubits) = sign * std::numbers::sqrt2 / 2.0;
  return {n_qubits, std::move(amps)};
}

QGrid husimi_q(const SymmetricState& s, std::span<const double> betas,
               std::span<const double> phi_azs) {
  if (betas.empty() || phi_azs.empty()) {
    throw DomainError("husimi_q: empty angle grid");
  }
  const int n = s.n_qubits();
  QGrid grid;
  grid.betas.assign(betas.begin(), betas.end());
  grid.phi_azs.assign(phi_azs.begin(), phi_azs.end());
  grid.values.assign(betas.size(), std::vector<double>(phi_azs.size(), 0.0));

  // Per-azimuth phases e^{i m phi}, conjugated into the state side.
  std::vector<Eigen::VectorXcd> phased;
  phased.reserve(phi_azs.size());
  for (double phi_az : phi_azs) {
    Eigen::VectorXcd v(n + 1);
    for (int m = 0; m <= n; ++m) {
      v(m) = std::conj(s[m]) * std::polar(1.0, m * phi_az);
    }
    phased.push_back(std::move(v));
  }

  double qmax = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const Eigen::VectorXcd css = css_state(n, betas[i]).amps();
    for (std::size_t jj = 0; jj < phi_azs.size(); ++jj) {
      const double q = std::norm(phased[jj].dot(css.conjugate()));
      grid.values[i][jj] = q;
      qmax = std::max(qmax, q);
    }
  }
  if (!(qmax > 0.0)) {
    throw NumericalError("husimi_q: Q vanishes on the whole grid");
  }
  for (auto& row : grid.values) {
    for (double& q : row) q /= qmax;
  }
  return grid;
}

QGrid husimi_q(const SymmetricState& s, int n_beta, int n_phi) {
  if (n_beta < 1 || n_phi < 1) {
    throw DomainError("husimi_q: grid resolution must be positive");
  }
  std::vector<double> betas(n_beta);
  std::vector<double> phis(n_phi);
  for (int i = 0; i < n_beta; ++i) {
    betas[i] = n_beta == 1 ? 0.0 : std::numbers::pi * i / (n_beta - 1);
  }
  for (int i = 0; i < n_phi; ++i) {
    phis[i] = 2.0 * std::numbers::pi * i / n_phi;
  }
  return husimi_q(s, betas, phis);
}

void write_qgrid_csv(std::ostream& os, const QGrid& grid) {
  os << "beta,phi_az,q\n";
  for (std::size_t i = 0; i < grid.betas.size(); ++i) {
    for (std::size_t j = 0; j < grid.phi_azs.size(); ++j) {
      os << format_double(grid.betas[i]) << ',' << format_double(grid.phi_azs[j]) << ','
         << format_double(grid.values[i][j]) << '\n';
    }
  }
}

}  // namespace grovercav

#include "grovercav/cavity.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "grovercav/io.hpp"

namespace grovercav {

namespace {

constexpr cplx kI{0.0, 1.0};

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

GaussHermiteRule golub_welsch(int n) {
  // Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(double(i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
    total += rule.weights[i];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

Eigen::MatrixXcd quadrature(const ReflectionFn& reflection, const Wavepacket& wp, int n_qubits,
                            const GaussHermiteRule& rule) {
  const int q = int(rule.nodes.size());
  Eigen::MatrixXcd r(n_qubits + 1, q);
  for (int j = 0; j < q; ++j) {
    const double omega = wp.center + wp.sigma * rule.nodes[j];
    const double sw = std::sqrt(rule.weights[j]);
    for (int n = 0; n <= n_qubits; ++n) r(n, j) = sw * reflection(n, omega);
  }
  return r * r.adjoint();
}

}  // namespace

// ---- parameters -----------------------------------------------------------

CavityParams CavityParams::make(double g, double kappa, double gamma, double delta) {
  if (!positive_finite(g) || !positive_finite(kappa) || !positive_finite(gamma)) {
    throw DomainError("cavity parameters: g, kappa and gamma must be positive and finite");
  }
  if (!std::isfinite(delta) || delta == 0.0) {
    throw DomainError("cavity parameters: detuning must be finite and nonzero");
  }
  return {g, kappa, gamma, delta};
}

CavityParams CavityParams::from_cooperativity(double cooperativity, double kappa, double gamma,
                                              double delta) {
  if (!positive_finite(cooperativity)) {
    throw DomainError("cooperativity must be positive and finite");
  }
  return make(std::sqrt(cooperativity * kappa * gamma), kappa, gamma, delta);
}

bool CavityParams::dispersive() const { return std::abs(delta) >= 5.0 * g; }

CavityParams CavityParams::with_delta(double new_delta) const {
  return make(g, kappa, gamma, new_delta);
}

Wavepacket Wavepacket::make(double sigma, double center) {
  if (!positive_finite(sigma)) throw DomainError("wavepacket sigma must be positive");
  if (!std::isfinite(center)) throw DomainError("wavepacket center must be finite");
  return {sigma, center};
}

// ---- reflection -----------------------------------------------------------

cplx reflection_amplitude(const CavityParams& p, int n_coupled, double omega) {
  if (n_coupled < 0) throw DomainError("number of coupled atoms must be >= 0");
  const cplx atoms = double(n_coupled) * p.g * p.g /
                     (-kI * (omega + p.delta) + 0.5 * p.gamma);
  return 1.0 - p.kappa / (-kI * omega + 0.5 * p.kappa + atoms);
}

double resonance_frequency(const CavityParams& p, int n_coupled) {
  if (n_coupled < 0) throw DomainError("number of coupled atoms must be >= 0");
  if (n_coupled == 0) return 0.0;
  const double ng2 = n_coupled * p.g * p.g;
  const double h2 = 0.25 * p.gamma * p.gamma;
  // Cavity-like root of omega (delta + omega) = n g^2, then Newton on
  // f(omega) = omega - n g^2 (omega + delta) / ((omega + delta)^2 + gamma^2/4).
  const double root = std::sqrt(p.delta * p.delta + 4.0 * ng2);
  double omega = p.delta > 0 ? 0.5 * (-p.delta + root) : 0.5 * (-p.delta - root);
  for (int it = 0; it < 100; ++it) {
    const double x = omega + p.delta;
    const double den = x * x + h2;
    const double f = omega - ng2 * x / den;
    const double df = 1.0 - ng2 * (h2 - x * x) / (den * den);
    const double step = f / df;
    omega -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(omega))) return omega;
  }
  throw NumericalError("resonance_frequency: Newton iteration did not converge");
}

double scatter_center(const CavityParams& p, int m, CenterRule rule) {
  if (rule == CenterRule::Dispersive) return m * p.omega_shift();
  return resonance_frequency(p, m);
}

// ---- kernels --------------------------------------------------------------

double ScatterKernel::hermiticity_error() const {
  return (k - k.adjoint()).cwiseAbs().maxCoeff();
}

double ScatterKernel::gram_violation() const {
  double worst = -INFINITY;
  for (int n = 0; n < k.rows(); ++n) {
    for (int l = 0; l < k.cols(); ++l) {
      worst = std::max(worst, std::norm(k(n, l)) - k(n, n).real() * k(l, l).real());
    }
  }
  return worst;
}

const GaussHermiteRule& gauss_hermite(int n_nodes) {
  if (n_nodes < 1) throw DomainError("Gauss-Hermite rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n_nodes);
  if (it == cache.end()) it = cache.emplace(n_nodes, golub_welsch(n_nodes)).first;
  return it->second;
}

ScatterKernel scatter_kernel(const ReflectionFn& reflection, const Wavepacket& wp,
                             int n_qubits) {
  if (n_qubits < 1) throw DomainError("scatter_kernel: number of qubits must be >= 1");
  if (!positive_finite(wp.sigma)) throw DomainError("scatter_kernel: sigma must be positive");
  Eigen::MatrixXcd coarse = quadrature(reflection, wp, n_qubits, gauss_hermite(kKernelNodes));
  const Eigen::MatrixXcd fine =
      quadrature(reflection, wp, n_qubits, gauss_hermite(2 * kKernelNodes));
  const double change = (fine - coarse).cwiseAbs().maxCoeff();
  if (!(change < kKernelTolerance)) {
    throw NumericalError("scatter_kernel: quadrature not converged (node doubling changed an "
                         "entry by " + format_double(change) + "; sigma=" +
                         format_double(wp.sigma) + ", center=" + format_double(wp.center) + ")");
  }
  // Symmetrize away rounding so downstream Hermiticity checks are exact.
  coarse = 0.5 * (coarse + coarse.adjoint()).eval();
  return {n_qubits, std::move(coarse)};
}

ScatterKernel scatter_kernel(const CavityParams& p, const Wavepacket& wp, int n_qubits) {
  return scatter_kernel([&p](int n, double omega) { return reflection_amplitude(p, n, omega); },
                        wp, n_qubits);
}

ScatterKernel scatter_kernel_for(const CavityParams& p, double sigma, int m, int n_qubits,
                                 CenterRule rule) {
  return scatter_kernel(p, Wavepacket::make(sigma, scatter_center(p, m, rule)), n_qubits);
}

ScatterKernel ideal_kernel(int n_qubits, int m) {
  if (m < 0 || m > n_qubits) throw DomainError("ideal_kernel: Dicke index out of range");
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n_qubits + 1);
  s(m) = -1.0;
  return {n_qubits, (s * s.transpose()).cast<cplx>()};
}

SymDensityMatrix apply_scatter(const SymDensityMatrix& rho, const ScatterKernel& kernel) {
  if (rho.n_qubits() != kernel.n_qubits) {
    throw DomainError("apply_scatter: density matrix and kernel sizes differ");
  }
  return {rho.n_qubits(), rho.mat().cwiseProduct(kernel.k)};
}

Heralded herald(const SymDensityMatrix& rho) {
  const double tr = rho.trace();
  if (!(tr >= 1e-15)) {
    throw DegenerateError("herald: trace " + format_double(tr) + " too small to renormalize");
  }
  return {SymDensityMatrix(rho.n_qubits(), rho.mat() / tr), std::min(tr, 1.0)};
}

double optimal_detuning_guess(double g, double kappa, double gamma, int m) {
  if (!positive_finite(g) || !positive_finite(kappa) || !positive_finite(gamma)) {
    throw DomainError("optimal_detuning_guess: rates must be positive");
  }
  if (m < 0) throw DomainError("optimal_detuning_guess: m must be >= 0");
  const double cooperativity = g * g / (kappa * gamma);
  const double d = std::pow(cooperativity / std::max(m, 1), 0.25);
  return g * g / (kappa * d);
}

void write_kernel_csv(std::ostream& os, const ScatterKernel& kernel) {
  os << "n,l,re,im\n";
  for (int n = 0; n < kernel.k.rows(); ++n) {
    for (int l = 0; l < kernel.k.cols(); ++l) {
      os << n << ',' << l << ',' << format_double(kernel.k(n, l).real()) << ','
         << format_double(kernel.k(n, l).imag()) << '\n';
    }
  }
}

}  // namespace grovercav

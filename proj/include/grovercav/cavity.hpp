#pragma once

// Single-photon reflection off a one-sided cavity holding N atoms, and the
// induced map on the symmetric-subspace density matrix.

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "grovercav/symspace.hpp"

namespace grovercav {

// Rates in common units (kappa = 1 is the usual choice). Cavity resonance at
// omega = 0, atomic resonance at omega = -delta.
struct CavityParams {
  double g;
  double kappa;
  double gamma;
  double delta;

  // Throws DomainError unless g, kappa, gamma > 0, delta != 0, all finite.
  static CavityParams make(double g, double kappa, double gamma, double delta);
  // g = sqrt(C kappa gamma)
  static CavityParams from_cooperativity(double cooperativity, double kappa, double gamma,
                                         double delta);

  double omega_shift() const { return g * g / delta; }
  double cooperativity() const { return g * g / (kappa * gamma); }
  double resolution() const { return omega_shift() / kappa; }
  // |delta| >= 5 g
  bool dispersive() const;
  CavityParams with_delta(double new_delta) const;
};

struct Wavepacket {
  double sigma;   // spectral standard deviation of |Phi(omega)|^2
  double center;  // central frequency relative to the bare cavity

  static Wavepacket make(double sigma, double center);
};

// r_n(omega) = 1 - kappa / [-i omega + kappa/2 + n g^2 / (-i(omega + delta) + gamma/2)]
cplx reflection_amplitude(const CavityParams& p, int n_coupled, double omega);

// Frequency at which r_n is real and negative: the dressed cavity resonance
// with n atoms in |1>, including the gamma correction. Tends to n g^2/delta
// for |delta| >> g.
double resonance_frequency(const CavityParams& p, int n_coupled);

enum class CenterRule {
  Resonant,    // resonance_frequency(p, m)
  Dispersive,  // m g^2 / delta
};

double scatter_center(const CavityParams& p, int m, CenterRule rule);

struct ScatterKernel {
  int n_qubits;
  Eigen::MatrixXcd k;  // k(n, l) = E_omega[r_n r_l^*]

  double hermiticity_error() const;
  // max over pairs of |K_nl|^2 - K_nn K_ll (<= 0 for a Gram matrix)
  double gram_violation() const;
};

using ReflectionFn = std::function<cplx(int n, double omega)>;

// Gauss-Hermite rule for the standard normal weight, weights summing to 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermiteRule& gauss_hermite(int n_nodes);

inline constexpr int kKernelNodes = 63;
inline constexpr double kKernelTolerance = 1e-10;

// Averages r_n r_l^* over the Gaussian wavepacket with 63 nodes and checks it
// against a 126-node rule; throws NumericalError if they differ by more than
// 1e-10 in any entry.
ScatterKernel scatter_kernel(const ReflectionFn& reflection, const Wavepacket& wp,
                             int n_qubits);
ScatterKernel scatter_kernel(const CavityParams& p, const Wavepacket& wp, int n_qubits);

// Photon resonant with Dicke index m, centred per `rule`.
ScatterKernel scatter_kernel_for(const CavityParams& p, double sigma, int m, int n_qubits,
                                 CenterRule rule = CenterRule::Resonant);

// Ideal chi_m: K = s s^T with s_n = -1 at n = m, +1 elsewhere.
ScatterKernel ideal_kernel(int n_qubits, int m);

// rho'_{nl} = rho_{nl} K_{nl}
SymDensityMatrix apply_scatter(const SymDensityMatrix& rho, const ScatterKernel& kernel);

struct Heralded {
  SymDensityMatrix state;
  double success_prob;
};
Heralded herald(const SymDensityMatrix& rho);

// Detuning at which 1/d^2 and m d^2/C balance: d = (C / max(m,1))^(1/4).
double optimal_detuning_guess(double g, double kappa, double gamma, int m);

// CSV "n,l,re,im"
void write_kernel_csv(std::ostream& os, const ScatterKernel& kernel);

}  // namespace grovercav

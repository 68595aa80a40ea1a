#pragma once

// Ideal and noisy execution of protocol plans, detuning/step optimization,
// parameter sweeps and log-log exponent fits.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "grovercav/cavity.hpp"
#include "grovercav/planner.hpp"
#include "grovercav/symspace.hpp"

namespace grovercav {

struct RunResult {
  double fidelity = 0.0;
  double success_prob = 1.0;
  int k_used = 0;
  double phi_used = 0.0;
  double delta_used = 0.0;  // 0 for ideal runs
  bool heralded = false;
  // Target amplitude magnitude before the first Grover step and after each
  // step (k + 1 entries).
  std::vector<double> amp_trajectory;
};

nlohmann::json to_json(const RunResult& r);

RunResult run_ideal(const ProtocolPlan& plan);

// Called after every pulse with the pulse index and the current state.
using PulseObserver = std::function<void(std::size_t, const SymDensityMatrix&)>;
// Kernel used for a Scatter pulse resonant with Dicke index m.
using KernelProvider = std::function<ScatterKernel(int m)>;

// Density-matrix execution with arbitrary scatter kernels. The unheralded
// fidelity is <t|rho|t> on the unnormalized state; heralding divides by the
// trace, which is reported as success_prob.
RunResult run_with_kernels(const ProtocolPlan& plan, const KernelProvider& kernels,
                           bool heralded, const PulseObserver& observer = {});

RunResult run_noisy(const ProtocolPlan& plan, const CavityParams& p, double sigma,
                    bool heralded, CenterRule rule = CenterRule::Resonant,
                    const PulseObserver& observer = {});

struct OptimizeSettings {
  int grid_points = 48;     // log-spaced detuning samples
  double span = 8.0;        // search over seed * [1/span, span]
  int extra_steps = 3;      // k in [k_min, k_min + extra_steps]
  double rel_tol = 1e-4;    // golden-section tolerance on log(delta)
  CenterRule rule = CenterRule::Resonant;
};

// Maximizes the (heralded or unheralded) fidelity over delta and k. The
// detuning in p_base is ignored; the seed is optimal_detuning_guess.
RunResult optimize(int n_qubits, Target target, const CavityParams& p_base, double sigma,
                   bool heralded, const OptimizeSettings& settings = {});

// Grid plus golden-section maximization of f over log(delta) in [lo, hi].
// Returns (argmax, max).
std::pair<double, double> maximize_log_scan(const std::function<double(double)>& f, double lo,
                                            double hi, int grid_points, double rel_tol);

struct SweepTable {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<RunResult> results;
};

// CSV "axis,fidelity,success_prob,infidelity,k,delta"
void write_sweep_csv(std::ostream& os, const SweepTable& table);

// C realized as g = sqrt(C kappa gamma) with kappa = gamma = 1.
SweepTable sweep_cooperativity(int n_qubits, Target target, std::span<const double> c_values,
                               double sigma, bool heralded, int jobs = 0,
                               const OptimizeSettings& settings = {});

// Fixed Dicke m, optimized per N.
SweepTable sweep_qubits(int m, std::span<const int> n_values, const CavityParams& p,
                        double sigma, bool heralded = false, int jobs = 0,
                        const OptimizeSettings& settings = {});

// One chi_0 photon applied to the initial state of the Dicke-m plan, delta
// optimized over [g/1000, 8 seed]. Fidelity against the ideal sign flip.
RunResult chi0_probe(int n_qubits, int m, const CavityParams& p_base, double sigma,
                     bool heralded);
SweepTable sweep_chi0_probe(int n_qubits, int m, std::span<const double> c_values,
                            double sigma, bool heralded, int jobs = 0);

// Decoherence from finite bandwidth alone: one Scatter(m) photon on the
// initial state of the Dicke-m plan, compared with the monochromatic
// (sigma -> 0) map diag(r_n(center)). Use a near-zero gamma to switch off
// atomic loss.
double wavepacket_infidelity(int n_qubits, int m, const CavityParams& p, double sigma);
SweepTable sweep_sigma(int n_qubits, int m, const CavityParams& p,
                       std::span<const double> sigmas, int jobs = 0);

struct PowerFit {
  double slope;
  double intercept;
  double r2;
};

// Least squares of log(y) on log(x).
PowerFit fit_exponent(std::span<const double> x, std::span<const double> y);
// Uses the infidelities 1 - F against the axis.
PowerFit fit_exponent(const SweepTable& table);

}  // namespace grovercav

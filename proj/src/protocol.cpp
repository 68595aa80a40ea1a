#include "grovercav/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "grovercav/io.hpp"
#include "grovercav/parallel.hpp"

namespace grovercav {

namespace {

void validate_plan(const ProtocolPlan& plan) {
  if (plan.n_qubits < 1) throw DomainError("malformed plan: number of qubits must be >= 1");
  if (plan.k < 0 || plan.grover_start < 0 || plan.pulses_per_step < 1) {
    throw DomainError("malformed plan: negative step count or bad step layout");
  }
  const std::size_t expected =
      std::size_t(plan.grover_start) + std::size_t(plan.k) * std::size_t(plan.pulses_per_step);
  if (plan.pulses.size() != expected) {
    throw DomainError("malformed pulse list: expected " + std::to_string(expected) +
                      " pulses, got " + std::to_string(plan.pulses.size()));
  }
  for (const Pulse& p : plan.pulses) {
    if (p.is_scatter() && (p.m < 0 || p.m > plan.n_qubits)) {
      throw DomainError("malformed pulse list: scatter index " + std::to_string(p.m) +
                        " out of range");
    }
    if (!p.is_scatter() && !std::isfinite(p.angle)) {
      throw DomainError("malformed pulse list: non-finite rotation angle");
    }
  }
  if (plan.target.is_ghz()) {
    if (plan.n_qubits % 2 != 0) throw DomainError("GHZ requires even N");
    if (plan.target.sign != 1 && plan.target.sign != -1) {
      throw DomainError("malformed plan: GHZ sign must be +1 or -1");
    }
  } else if (plan.target.m < 0 || plan.target.m > plan.n_qubits) {
    throw DomainError("malformed plan: Dicke target out of range");
  }
}

// Caches one rotation matrix per distinct angle; R(-a) is taken as R(a)^T.
class RotationCache {
 public:
  explicit RotationCache(int n_qubits) : n_qubits_(n_qubits) {}

  const RotationMatrix& get(double angle) {
    if (auto it = cache_.find(angle); it != cache_.end()) return it->second;
    if (auto it = cache_.find(-angle); it != cache_.end()) {
      RotationMatrix r(n_qubits_, angle, it->second.mat().transpose());
      return cache_.emplace(angle, std::move(r)).first->second;
    }
    return cache_.emplace(angle, rotation_matrix(n_qubits_, angle)).first->second;
  }

 private:
  int n_qubits_;
  std::map<double, RotationMatrix> cache_;
};

bool step_boundary(const ProtocolPlan& plan, std::size_t pulses_done) {
  if (pulses_done < std::size_t(plan.grover_start)) return false;
  return (pulses_done - plan.grover_start) % plan.pulses_per_step == 0;
}

// Plan execution on density matrices with reusable rotation matrices.
class PlanExecutor {
 public:
  explicit PlanExecutor(const ProtocolPlan& plan)
      : plan_(plan), rotations_(plan.n_qubits), target_(plan.target_state()) {
    validate_plan(plan_);
  }

  RunResult run(const KernelProvider& kernels, bool heralded, const PulseObserver& observer) {
    std::map<int, ScatterKernel> kernel_cache;
    SymDensityMatrix rho = SymDensityMatrix::from_pure(dicke(plan_.n_qubits, 0));
    RunResult result;
    result.k_used = plan_.k;
    result.phi_used = plan_.phi;
    result.heralded = heralded;

    auto record = [&] {
      double f = rho.expectation(target_);
      if (heralded) f /= rho.trace();
      result.amp_trajectory.push_back(std::sqrt(std::max(f, 0.0)));
    };

    if (step_boundary(plan_, 0)) record();
    for (std::size_t i = 0; i < plan_.pulses.size(); ++i) {
      const Pulse& pulse = plan_.pulses[i];
      if (pulse.is_scatter()) {
        auto it = kernel_cache.find(pulse.m);
        if (it == kernel_cache.end()) it = kernel_cache.emplace(pulse.m, kernels(pulse.m)).first;
        rho = apply_scatter(rho, it->second);
      } else {
        rho = rotations_.get(pulse.angle).conjugate(rho);
      }
      if (observer) observer(i, rho);
      if (step_boundary(plan_, i + 1)) record();
    }

    const double overlap = rho.expectation(target_);
    if (heralded) {
      const Heralded h = herald(rho);
      result.fidelity = h.state.expectation(target_);
      result.success_prob = h.success_prob;
    } else {
      result.fidelity = overlap;
      result.success_prob = 1.0;
    }
    return result;
  }

 private:
  const ProtocolPlan& plan_;
  RotationCache rotations_;
  SymmetricState target_;
};

double golden_section_log(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol, double& best_x, double& best_f) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  auto eval = [&](double u) {
    const double x = std::exp(u);
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
    return v;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < 200 && b - a > rel_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return best_f;
}

double objective(const RunResult& r) { return r.fidelity; }

int min_steps_for(int n_qubits, const Target& target) {
  return target.is_ghz() ? min_steps_ghz(n_qubits) : min_steps_dicke(n_qubits, target.m);
}

int seed_index(int n_qubits, const Target& target) {
  return target.is_ghz() ? n_qubits / 2 : target.m;
}

void check_axis(std::span<const double> axis) {
  if (axis.empty()) throw DomainError("sweep axis is empty");
  // Rows come back in the order given; only the values are checked.
  for (double v : axis) {
    if (!(std::isfinite(v) && v > 0.0)) throw DomainError("sweep axis values must be positive");
  }
}

}  // namespace

nlohmann::json to_json(const RunResult& r) {
  return {
      {"fidelity", r.fidelity},       {"success_prob", r.success_prob},
      {"k_used", r.k_used},           {"phi_used", r.phi_used},
      {"delta_used", r.delta_used},   {"heralded", r.heralded},
      {"amp_trajectory", r.amp_trajectory},
  };
}

RunResult run_ideal(const ProtocolPlan& plan) {
  validate_plan(plan);
  RotationCache rotations(plan.n_qubits);
  const SymmetricState target = plan.target_state();
  SymmetricState state = dicke(plan.n_qubits, 0);
  RunResult result;
  result.k_used = plan.k;
  result.phi_used = plan.phi;

  auto record = [&] { result.amp_trajectory.push_back(std::abs(target.inner(state))); };
  if (step_boundary(plan, 0)) record();
  for (std::size_t i = 0; i < plan.pulses.size(); ++i) {
    const Pulse& pulse = plan.pulses[i];
    state = pulse.is_scatter() ? phase_flip(state, pulse.m)
                               : rotations.get(pulse.angle).apply(state);
    if (step_boundary(plan, i + 1)) record();
  }
  result.fidelity = std::norm(target.inner(state));
  result.success_prob = 1.0;
  return result;
}

RunResult run_with_kernels(const ProtocolPlan& plan, const KernelProvider& kernels,
                           bool heralded, const PulseObserver& observer) {
  PlanExecutor exec(plan);
  return exec.run(kernels, heralded, observer);
}

RunResult run_noisy(const ProtocolPlan& plan, const CavityParams& p, double sigma,
                    bool heralded, CenterRule rule, const PulseObserver& observer) {
  if (!(sigma > 0.0)) throw DomainError("run_noisy: sigma must be positive");
  auto kernels = [&](int m) { return scatter_kernel_for(p, sigma, m, plan.n_qubits, rule); };
  RunResult r = run_with_kernels(plan, kernels, heralded, observer);
  r.delta_used = p.delta;
  return r;
}

std::pair<double, double> maximize_log_scan(const std::function<double(double)>& f, double lo,
                                            double hi, int grid_points, double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo) || grid_points < 3) {
    throw DomainError("maximize_log_scan: need 0 < lo < hi and at least 3 grid points");
  }
  std::vector<double> xs(grid_points);
  std::vector<double> fs(grid_points);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < grid_points; ++i) {
    xs[i] = std::exp(a + (b - a) * i / (grid_points - 1));
    fs[i] = f(xs[i]);
  }
  const int best = int(std::max_element(fs.begin(), fs.end()) - fs.begin());
  double best_x = xs[best];
  double best_f = fs[best];
  const int left = std::max(best - 1, 0);
  const int right = std::min(best + 1, grid_points - 1);
  golden_section_log(f, xs[left], xs[right], rel_tol, best_x, best_f);
  return {best_x, best_f};
}

RunResult optimize(int n_qubits, Target target, const CavityParams& p_base, double sigma,
                   bool heralded, const OptimizeSettings& settings) {
  const int k_min = min_steps_for(n_qubits, target);
  const double seed =
      optimal_detuning_guess(p_base.g, p_base.kappa, p_base.gamma, seed_index(n_qubits, target));

  RunResult best;
  bool have_best = false;
  for (int k = k_min; k <= k_min + settings.extra_steps; ++k) {
    const ProtocolPlan pl = plan(n_qubits, target, k);
    PlanExecutor exec(pl);
    auto run_at = [&](double delta) {
      const CavityParams p = p_base.with_delta(delta);
      auto kernels = [&](int m) {
        return scatter_kernel_for(p, sigma, m, n_qubits, settings.rule);
      };
      RunResult r = exec.run(kernels, heralded, {});
      r.delta_used = delta;
      return r;
    };
    auto f = [&](double delta) { return objective(run_at(delta)); };

    const auto [arg, val] = maximize_log_scan(f, seed / settings.span, seed * settings.span,
                                              settings.grid_points, settings.rel_tol);
    RunResult at_seed = run_at(seed);
    RunResult candidate = objective(at_seed) >= val ? std::move(at_seed) : run_at(arg);
    if (!have_best || objective(candidate) > objective(best)) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  if (!have_best) throw InfeasibleError("optimize: no feasible step count");
  return best;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "axis,fidelity,success_prob,infidelity,k,delta\n";
  for (std::size_t i = 0; i < table.axis.size(); ++i) {
    const RunResult& r = table.results[i];
    os << format_double(table.axis[i]) << ',' << format_double(r.fidelity) << ','
       << format_double(r.success_prob) << ',' << format_double(1.0 - r.fidelity) << ','
       << r.k_used << ',' << format_double(r.delta_used) << '\n';
  }
}

SweepTable sweep_cooperativity(int n_qubits, Target target, std::span<const double> c_values,
                               double sigma, bool heralded, int jobs,
                               const OptimizeSettings& settings) {
  check_axis(c_values);
  SweepTable table{"C", {c_values.begin(), c_values.end()}, {}};
  table.results.resize(c_values.size());
  parallel_for(c_values.size(), jobs, [&](std::size_t i) {
    // delta is a placeholder; optimize chooses it.
    const CavityParams p = CavityParams::from_cooperativity(c_values[i], 1.0, 1.0, 1.0);
    table.results[i] = optimize(n_qubits, target, p, sigma, heralded, settings);
  });
  return table;
}

SweepTable sweep_qubits(int m, std::span<const int> n_values, const CavityParams& p,
                        double sigma, bool heralded, int jobs,
                        const OptimizeSettings& settings) {
  std::vector<double> axis(n_values.begin(), n_values.end());
  check_axis(axis);
  SweepTable table{"N", axis, {}};
  table.results.resize(n_values.size());
  parallel_for(n_values.size(), jobs, [&](std::size_t i) {
    table.results[i] = optimize(n_values[i], Target::dicke(m), p, sigma, heralded, settings);
  });
  return table;
}

RunResult chi0_probe(int n_qubits, int m, const CavityParams& p_base, double sigma,
                     bool heralded) {
  const ProtocolPlan pl = plan(n_qubits, Target::dicke(m));
  const SymmetricState psi = apply_rotation(dicke(n_qubits, 0), pl.phi);
  const SymmetricState ideal = phase_flip(psi, 0);
  const SymDensityMatrix rho = SymDensityMatrix::from_pure(psi);

  auto fidelity_at = [&](double delta, double* success) {
    const CavityParams p = p_base.with_delta(delta);
    const SymDensityMatrix out =
        apply_scatter(rho, scatter_kernel_for(p, sigma, 0, n_qubits, CenterRule::Resonant));
    const double tr = out.trace();
    if (success) *success = heralded ? tr : 1.0;
    const double f = out.expectation(ideal);
    return heralded ? f / tr : f;
  };
  const double seed = optimal_detuning_guess(p_base.g, p_base.kappa, p_base.gamma, m);
  const auto [delta, fid] = maximize_log_scan(
      [&](double d) { return fidelity_at(d, nullptr); }, p_base.g / 1000.0, 8.0 * seed, 96,
      1e-4);

  RunResult r;
  r.heralded = heralded;
  r.fidelity = fidelity_at(delta, &r.success_prob);
  r.k_used = 0;
  r.phi_used = pl.phi;
  r.delta_used = delta;
  r.amp_trajectory = {std::sqrt(std::max(fid, 0.0))};
  return r;
}

SweepTable sweep_chi0_probe(int n_qubits, int m, std::span<const double> c_values,
                            double sigma, bool heralded, int jobs) {
  check_axis(c_values);
  SweepTable table{"C", {c_values.begin(), c_values.end()}, {}};
  table.results.resize(c_values.size());
  parallel_for(c_values.size(), jobs, [&](std::size_t i) {
    const CavityParams p = CavityParams::from_cooperativity(c_values[i], 1.0, 1.0, 1.0);
    table.results[i] = chi0_probe(n_qubits, m, p, sigma, heralded);
  });
  return table;
}

double wavepacket_infidelity(int n_qubits, int m, const CavityParams& p, double sigma) {
  const ProtocolPlan pl = plan(n_qubits, Target::dicke(m));
  const SymmetricState psi = apply_rotation(dicke(n_qubits, 0), pl.phi);
  const double center = resonance_frequency(p, m);
  const ScatterKernel kernel = scatter_kernel(p, Wavepacket::make(sigma, center), n_qubits);
  const SymDensityMatrix out = apply_scatter(SymDensityMatrix::from_pure(psi), kernel);

  Eigen::VectorXcd ref(n_qubits + 1);
  for (int n = 0; n <= n_qubits; ++n) ref(n) = reflection_amplitude(p, n, center) * psi[n];
  const double ref_norm2 = ref.squaredNorm();
  const double overlap = ref.dot(out.mat() * ref).real();
  return 1.0 - overlap / (ref_norm2 * out.trace());
}

SweepTable sweep_sigma(int n_qubits, int m, const CavityParams& p,
                       std::span<const double> sigmas, int jobs) {
  check_axis(sigmas);
  SweepTable table{"sigma", {sigmas.begin(), sigmas.end()}, {}};
  table.results.resize(sigmas.size());
  parallel_for(sigmas.size(), jobs, [&](std::size_t i) {
    RunResult r;
    r.fidelity = 1.0 - wavepacket_infidelity(n_qubits, m, p, sigmas[i]);
    r.delta_used = p.delta;
    r.amp_trajectory = {std::sqrt(std::max(r.fidelity, 0.0))};
    table.results[i] = std::move(r);
  });
  return table;
}

PowerFit fit_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("fit_exponent: need at least two (x, y) pairs of equal length");
  }
  const std::size_t n = x.size();
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw DomainError("fit_exponent: log-log fit needs positive data");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_exponent: x values are all equal");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PowerFit fit_exponent(const SweepTable& table) {
  std::vector<double> infid;
  infid.reserve(table.results.size());
  for (const RunResult& r : table.results) infid.push_back(1.0 - r.fidelity);
  return fit_exponent(table.axis, infid);
}

}  // namespace grovercav

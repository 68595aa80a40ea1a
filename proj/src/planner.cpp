#include "grovercav/planner.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include "grovercav/io.hpp"
#include "grovercav/parallel.hpp"

namespace grovercav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRootResidual = 1e-12;
constexpr int kMaxSteps = 100000;

void check_dicke_args(int n_qubits, int m) {
  if (n_qubits < 1) throw DomainError("number of qubits must be >= 1");
  if (m < 0 || m > n_qubits) {
    throw DomainError("Dicke index " + std::to_string(m) + " outside [0, " +
                      std::to_string(n_qubits) + "]");
  }
}

void check_ghz_args(int n_qubits) {
  if (n_qubits < 2 || n_qubits % 2 != 0) {
    throw DomainError("GHZ requires even N");
  }
}

// log of sqrt(C(n,m)) |x|^(n-m) |y|^m with 0^0 = 1.
double log_term(int n, int m, double x, double y) {
  double v = log_sqrt_binomial(n, m);
  if (n - m > 0) v += (n - m) * std::log(std::abs(x));
  if (m > 0) v += m * std::log(std::abs(y));
  return v;
}

// Bisection for overlap(phi) = target on [lo, hi], which must bracket the
// root. Works on log(overlap) so deep tails stay resolved.
double bisect_overlap(const std::function<double(double)>& overlap, double lo, double hi,
                      double target) {
  const double log_target = std::log(target);
  auto g = [&](double phi) { return std::log(overlap(phi)) - log_target; };
  double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if ((g_lo < 0) == (g_hi < 0)) {
    throw NumericalError("exact-hit root not bracketed on [" + format_double(lo) + ", " +
                         format_double(hi) + "]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0) == (g_lo < 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  const double phi = 0.5 * (lo + hi);
  const double residual = std::abs(overlap(phi) - target);
  if (residual > kRootResidual) {
    throw NumericalError("exact-hit root residual " + format_double(residual) +
                         " exceeds tolerance");
  }
  return phi;
}

int min_steps_for(double max_overlap) {
  int k = 0;
  while (exact_hit_overlap(k) > max_overlap) {
    if (++k > kMaxSteps) throw NumericalError("step count search did not terminate");
  }
  return k;
}

std::vector<Pulse> dicke_pulses(int m, int k, double phi) {
  std::vector<Pulse> pulses{Pulse::rotate(phi)};
  for (int step = 0; step < k; ++step) {
    pulses.push_back(Pulse::scatter(m));
    pulses.push_back(Pulse::rotate(-phi));
    pulses.push_back(Pulse::scatter(0));
    pulses.push_back(Pulse::rotate(phi));
  }
  return pulses;
}

}  // namespace

// ---- ProtocolPlan ---------------------------------------------------------

SymmetricState ProtocolPlan::target_state() const {
  if (target.is_ghz()) return ghz_state(n_qubits, target.sign);
  return dicke(n_qubits, target.m);
}

int ProtocolPlan::scatter_count() const {
  int count = 0;
  for (const Pulse& p : pulses) count += p.is_scatter() ? 1 : 0;
  return count;
}

int ProtocolPlan::grover_scatter_count() const {
  int count = 0;
  for (std::size_t i = grover_start; i < pulses.size(); ++i) {
    count += pulses[i].is_scatter() ? 1 : 0;
  }
  return count;
}

// ---- overlaps and step counts ---------------------------------------------

double exact_hit_overlap(int k) {
  if (k < 0) throw DomainError("step count must be >= 0");
  return std::sin(kPi / (2.0 * (2 * k + 1)));
}

double dicke_overlap(int n_qubits, int m, double phi) {
  check_dicke_args(n_qubits, m);
  if (!(phi >= 0.0 && phi <= kPi)) {
    throw DomainError("dicke_overlap: phi must lie in [0, pi], got " + format_double(phi));
  }
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  if ((n_qubits - m > 0 && c == 0.0) || (m > 0 && s == 0.0)) return 0.0;
  return std::exp(log_term(n_qubits, m, c, s));
}

double optimal_phi(int n_qubits, int m) {
  check_dicke_args(n_qubits, m);
  if (m == 0) return 0.0;
  if (m == n_qubits) return kPi;
  return 2.0 * std::atan(std::sqrt(double(m) / double(n_qubits - m)));
}

int min_steps_dicke(int n_qubits, int m) {
  return min_steps_for(dicke_overlap(n_qubits, m, optimal_phi(n_qubits, m)));
}

double solve_phi_dicke(int n_qubits, int m, int k) {
  const int k_min = min_steps_dicke(n_qubits, m);
  if (k < k_min) {
    throw InfeasibleError("Dicke target m=" + std::to_string(m) + " with N=" +
                          std::to_string(n_qubits) + " needs at least " +
                          std::to_string(k_min) + " Grover steps, got " + std::to_string(k));
  }
  const double phi_opt = optimal_phi(n_qubits, m);
  if (k == 0) return phi_opt;  // only reachable for m = 0 or m = N
  const double target = exact_hit_overlap(k);
  auto overlap = [&](double phi) { return dicke_overlap(n_qubits, m, phi); };
  if (m == 0) return bisect_overlap(overlap, 0.0, kPi, target);
  return bisect_overlap(overlap, 0.0, phi_opt, target);
}

int ghz_sign(int n_qubits) {
  check_ghz_args(n_qubits);
  return (n_qubits / 2) % 2 == 0 ? 1 : -1;
}

double ghz_overlap(int n_qubits, double phi) {
  check_ghz_args(n_qubits);
  const int half = n_qubits / 2;
  // <0|R(-phi)|N/2> = sqrt(C(N,N/2)) c^(N/2) s^(N/2) and
  // <N|R(-phi)|N/2> = sqrt(C(N,N/2)) (-s)^(N/2) c^(N/2).
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  if (c == 0.0 || s == 0.0) return 0.0;
  const double mag = std::exp(log_term(n_qubits, half, c, s));
  const double sign0 = ((c < 0) != (s < 0)) && half % 2 == 1 ? -1.0 : 1.0;
  const double a0 = sign0 * mag;
  const double a_n = (half % 2 == 1 ? -1.0 : 1.0) * a0;
  return std::max(std::abs(a0 + a_n), std::abs(a0 - a_n)) / std::numbers::sqrt2;
}

double ghz_antisymmetric_overlap(int n_qubits, double phi) {
  const int sign = ghz_sign(n_qubits);
  const SymmetricState rotated = apply_rotation(dicke(n_qubits, n_qubits / 2), -phi);
  return std::abs(ghz_state(n_qubits, -sign).inner(rotated));
}

int min_steps_ghz(int n_qubits) {
  return min_steps_for(ghz_overlap(n_qubits, kPi / 2));
}

double solve_phi_ghz(int n_qubits, int k) {
  const int k_min = min_steps_ghz(n_qubits);
  if (k < k_min) {
    throw InfeasibleError("GHZ target with N=" + std::to_string(n_qubits) +
                          " needs at least " + std::to_string(k_min) + " Grover steps, got " +
                          std::to_string(k));
  }
  if (k == 0) return kPi / 2;
  auto overlap = [&](double phi) { return ghz_overlap(n_qubits, phi); };
  return bisect_overlap(overlap, 0.0, kPi / 2, exact_hit_overlap(k));
}

double estimate_steps(double m) { return 1.24 * std::pow(m, 0.25) - 0.5; }

double estimate_steps_half(double n_qubits) { return 0.88 * std::pow(n_qubits, 0.25) - 0.5; }

// ---- contour --------------------------------------------------------------

std::vector<ContourRow> contour_table(int n_max, int jobs) {
  if (n_max < 3) throw DomainError("contour requires n_max >= 3");
  const std::size_t count = n_max - 2;
  std::vector<std::vector<ContourRow>> per_n(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const int n = int(i) + 3;
    auto& rows = per_n[i];
    rows.reserve(n + 1);
    for (int m = 0; m <= n; ++m) rows.push_back({n, m, min_steps_dicke(n, m)});
  });
  std::vector<ContourRow> out;
  for (auto& rows : per_n) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

void write_contour_csv(std::ostream& os, const std::vector<ContourRow>& rows) {
  os << "N,m,k\n";
  for (const auto& r : rows) os << r.n_qubits << ',' << r.m << ',' << r.k << '\n';
}

// ---- plans ----------------------------------------------------------------

ProtocolPlan plan(int n_qubits, Target target, std::optional<int> k_override) {
  ProtocolPlan p;
  p.n_qubits = n_qubits;
  if (!target.is_ghz()) {
    check_dicke_args(n_qubits, target.m);
    p.target = Target::dicke(target.m);
    p.k = k_override.value_or(min_steps_dicke(n_qubits, target.m));
    p.phi = solve_phi_dicke(n_qubits, target.m, p.k);
    p.theta = 2.0 * std::asin(std::min(1.0, dicke_overlap(n_qubits, target.m, p.phi)));
    p.pulses = dicke_pulses(target.m, p.k, p.phi);
    p.grover_start = 1;
    p.pulses_per_step = 4;
    return p;
  }

  check_ghz_args(n_qubits);
  const int half = n_qubits / 2;
  p.target = Target::ghz();
  p.target.sign = ghz_sign(n_qubits);
  p.prep_k = min_steps_dicke(n_qubits, half);
  p.prep_phi = solve_phi_dicke(n_qubits, half, p.prep_k);
  p.k = k_override.value_or(min_steps_ghz(n_qubits));
  p.phi = solve_phi_ghz(n_qubits, p.k);
  p.theta = 2.0 * std::asin(std::min(1.0, ghz_overlap(n_qubits, p.phi)));

  p.pulses = dicke_pulses(half, p.prep_k, p.prep_phi);
  p.pulses.push_back(Pulse::rotate(-p.phi));
  p.grover_start = int(p.pulses.size());
  p.pulses_per_step = 5;
  for (int step = 0; step < p.k; ++step) {
    p.pulses.push_back(Pulse::scatter(n_qubits));
    p.pulses.push_back(Pulse::scatter(0));
    p.pulses.push_back(Pulse::rotate(p.phi));
    p.pulses.push_back(Pulse::scatter(half));
    p.pulses.push_back(Pulse::rotate(-p.phi));
  }
  return p;
}

nlohmann::json to_json(const ProtocolPlan& p) {
  nlohmann::json pulses = nlohmann::json::array();
  for (const Pulse& pulse : p.pulses) {
    if (pulse.is_scatter()) {
      pulses.push_back({{"type", "scatter"}, {"m", pulse.m}});
    } else {
      pulses.push_back({{"type", "rotate"}, {"angle", pulse.angle}});
    }
  }
  nlohmann::json target;
  if (p.target.is_ghz()) {
    target = {{"type", "ghz"}, {"sign", p.target.sign}};
  } else {
    target = {{"type", "dicke"}, {"m", p.target.m}};
  }
  nlohmann::json j = {
      {"n_qubits", p.n_qubits},
      {"target", target},
      {"k", p.k},
      {"phi", p.phi},
      {"theta", p.theta},
      {"grover_start", p.grover_start},
      {"pulses_per_step", p.pulses_per_step},
      {"pulses", pulses},
  };
  if (p.target.is_ghz()) {
    j["prep_k"] = p.prep_k;
    j["prep_phi"] = p.prep_phi;
  }
  return j;
}

ProtocolPlan plan_from_json(const nlohmann::json& j) {
  try {
    ProtocolPlan p;
    p.n_qubits = j.at("n_qubits").get<int>();
    const auto& target = j.at("target");
    const std::string type = target.at("type").get<std::string>();
    if (type == "ghz") {
      p.target = Target::ghz();
      p.target.sign = target.at("sign").get<int>();
      p.prep_k = j.value("prep_k", 0);
      p.prep_phi = j.value("prep_phi", 0.0);
    } else if (type == "dicke") {
      p.target = Target::dicke(target.at("m").get<int>());
    } else {
      throw DomainError("plan JSON: unknown target type '" + type + "'");
    }
    p.k = j.at("k").get<int>();
    p.phi = j.at("phi").get<double>();
    p.theta = j.at("theta").get<double>();
    p.grover_start = j.at("grover_start").get<int>();
    p.pulses_per_step = j.at("pulses_per_step").get<int>();
    for (const auto& pj : j.at("pulses")) {
      const std::string kind = pj.at("type").get<std::string>();
      if (kind == "scatter") {
        p.pulses.push_back(Pulse::scatter(pj.at("m").get<int>()));
      } else if (kind == "rotate") {
        p.pulses.push_back(Pulse::rotate(pj.at("angle").get<double>()));
      } else {
        throw DomainError("plan JSON: unknown pulse type '" + kind + "'");
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("plan JSON: ") + e.what());
  }
}

}  // namespace grovercav

#pragma once

// Rotation angle and Grover step count for Dicke and GHZ targets, and the
// resulting pulse sequences.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "grovercav/symspace.hpp"

namespace grovercav {

struct Target {
  enum class Kind { Dicke, Ghz };
  Kind kind = Kind::Dicke;
  int m = 0;     // Dicke index (Dicke targets)
  int sign = 1;  // relative phase of |N> (GHZ targets)

  static Target dicke(int m) { return {Kind::Dicke, m, 1}; }
  static Target ghz() { return {Kind::Ghz, 0, 1}; }
  bool is_ghz() const { return kind == Kind::Ghz; }
};

struct Pulse {
  enum class Kind { Rotate, Scatter };
  Kind kind = Kind::Rotate;
  double angle = 0.0;  // Rotate
  int m = 0;           // Scatter: photon at the resonance of Dicke index m

  static Pulse rotate(double angle) { return {Kind::Rotate, angle, 0}; }
  static Pulse scatter(int m) { return {Kind::Scatter, 0.0, m}; }
  bool is_scatter() const { return kind == Kind::Scatter; }
};

struct ProtocolPlan {
  int n_qubits = 0;
  Target target;
  int k = 0;           // Grover steps towards the target
  double phi = 0.0;    // rotation angle of the Grover stage
  double theta = 0.0;  // 2 asin(<target|initial>)
  std::vector<Pulse> pulses;

  // pulses[0, grover_start) prepare the initial state; every following
  // block of pulses_per_step pulses is one Grover step.
  int grover_start = 0;
  int pulses_per_step = 4;

  // GHZ plans: the Dicke-N/2 preparation stage.
  int prep_k = 0;
  double prep_phi = 0.0;

  SymmetricState target_state() const;
  int scatter_count() const;
  int grover_scatter_count() const;
};

// sin(pi / (2(2k+1))): the overlap for which k steps land exactly on target.
double exact_hit_overlap(int k);

// Dicke-m amplitude of css_state(N, phi), phi in [0, pi].
double dicke_overlap(int n_qubits, int m, double phi);
// Maximizer of dicke_overlap over phi: tan^2(phi/2) = m/(N-m).
double optimal_phi(int n_qubits, int m);
int min_steps_dicke(int n_qubits, int m);
// Root of dicke_overlap = exact_hit_overlap(k) below optimal_phi (above it
// for m = 0). Throws InfeasibleError if k < min_steps_dicke.
double solve_phi_dicke(int n_qubits, int m, int k);

// Overlap of R(-phi)|N/2> with the sign-matched GHZ state. N must be even.
double ghz_overlap(int n_qubits, double phi);
// Relative GHZ phase produced by the rotated |N/2>: (-1)^(N/2).
int ghz_sign(int n_qubits);
// Overlap with the opposite-sign GHZ state, computed through the full
// rotation matrix rather than closed forms.
double ghz_antisymmetric_overlap(int n_qubits, double phi);
int min_steps_ghz(int n_qubits);
double solve_phi_ghz(int n_qubits, int k);

// k ~ 1.24 m^(1/4) - 1/2 (small m, large N)
double estimate_steps(double m);
// k ~ 0.88 N^(1/4) - 1/2 (m = N/2)
double estimate_steps_half(double n_qubits);

struct ContourRow {
  int n_qubits;
  int m;
  int k;
};

// min_steps_dicke for 3 <= N <= n_max and 0 <= m <= N, ordered by (N, m).
// jobs <= 0 uses the hardware concurrency.
std::vector<ContourRow> contour_table(int n_max, int jobs = 0);
void write_contour_csv(std::ostream& os, const std::vector<ContourRow>& rows);

ProtocolPlan plan(int n_qubits, Target target, std::optional<int> k_override = std::nullopt);

nlohmann::json to_json(const ProtocolPlan& p);
ProtocolPlan plan_from_json(const nlohmann::json& j);

}  // namespace grovercav

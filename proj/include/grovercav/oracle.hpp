#pragma once

// Brute-force 2^N state-vector reference (N <= 12) for cross-checking the
// symmetric-subspace simulator.

#include <span>

#include <Eigen/Dense>

#include "grovercav/planner.hpp"
#include "grovercav/symspace.hpp"

namespace grovercav::oracle {

inline constexpr int kMaxQubits = 12;

class FullState {
 public:
  // |0...0>
  explicit FullState(int n_qubits);
  FullState(int n_qubits, Eigen::VectorXcd amps);

  int n_qubits() const { return n_qubits_; }
  const Eigen::VectorXcd& amps() const { return amps_; }
  Eigen::VectorXcd& amps() { return amps_; }
  double norm() const { return amps_.norm(); }

 private:
  int n_qubits_;
  Eigen::VectorXcd amps_;  // index bit q = state of qubit q
};

// Single-qubit |0> -> cos(phi/2)|0> + sin(phi/2)|1> on every qubit.
FullState full_rotation(const FullState& s, double phi);
// Negates every amplitude whose bitstring has Hamming weight m.
FullState full_chi(const FullState& s, int m);
// Permutes qubits: new qubit q takes the value of old qubit perm[q].
FullState permute_qubits(const FullState& s, std::span<const int> perm);

FullState lift(const SymmetricState& s);

struct Projection {
  Eigen::VectorXcd amps;  // symmetric-sector components (not renormalized)
  double residual_norm;   // norm outside the symmetric sector
};
Projection project(const FullState& f);

struct Verification {
  double max_deviation;  // max over pulses of |project(full) - sym|
  double max_residual;   // max over pulses of the non-symmetric norm
};

// Runs the pulse list from |0...0> in both representations with ideal
// phase flips and compares after every pulse.
Verification verify_sequence(int n_qubits, std::span<const Pulse> pulses);
Verification verify_protocol(const ProtocolPlan& plan);

}  // namespace grovercav::oracle

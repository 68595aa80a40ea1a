#include "grovercav/oracle.hpp"

#include <bit>
#include <cmath>

namespace grovercav::oracle {

namespace {

void check_size(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DomainError("full-space oracle supports 1..12 qubits, got " +
                      std::to_string(n_qubits));
  }
}

}  // namespace

FullState::FullState(int n_qubits)
    : n_qubits_(n_qubits), amps_(Eigen::VectorXcd::Zero(std::size_t(1) << n_qubits)) {
  check_size(n_qubits);
  amps_(0) = 1.0;
}

FullState::FullState(int n_qubits, Eigen::VectorXcd amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {
  check_size(n_qubits);
  if (amps_.size() != (Eigen::Index(1) << n_qubits)) {
    throw DomainError("FullState: amplitude vector must have length 2^N");
  }
  if (std::abs(amps_.norm() - 1.0) > 1e-9) throw DomainError("FullState: not normalized");
}

FullState full_rotation(const FullState& s, double phi) {
  const double c = std::cos(0.5 * phi);
  const double sn = std::sin(0.5 * phi);
  Eigen::VectorXcd a = s.amps();
  const Eigen::Index dim = a.size();
  for (int q = 0; q < s.n_qubits(); ++q) {
    const Eigen::Index bit = Eigen::Index(1) << q;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const cplx a0 = a(i);
      const cplx a1 = a(i | bit);
      a(i) = c * a0 - sn * a1;
      a(i | bit) = sn * a0 + c * a1;
    }
  }
  return {s.n_qubits(), std::move(a)};
}

FullState full_chi(const FullState& s, int m) {
  if (m < 0 || m > s.n_qubits()) throw DomainError("full_chi: Hamming weight out of range");
  Eigen::VectorXcd a = s.amps();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::popcount(static_cast<unsigned>(i)) == m) a(i) = -a(i);
  }
  return {s.n_qubits(), std::move(a)};
}

FullState permute_qubits(const FullState& s, std::span<const int> perm) {
  const int n = s.n_qubits();
  if (int(perm.size()) != n) throw DomainError("permute_qubits: permutation size mismatch");
  Eigen::VectorXcd out(s.amps().size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    Eigen::Index j = 0;
    for (int q = 0; q < n; ++q) {
      if (i >> perm[q] & 1) j |= Eigen::Index(1) << q;
    }
    out(j) = s.amps()(i);
  }
  return {n, std::move(out)};
}

FullState lift(const SymmetricState& s) {
  const int n = s.n_qubits();
  check_size(n);
  Eigen::VectorXcd a(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const int m = std::popcount(static_cast<unsigned>(i));
    a(i) = s[m] * std::exp(-log_sqrt_binomial(n, m));
  }
  return {n, std::move(a)};
}

Projection project(const FullState& f) {
  const int n = f.n_qubits();
  Projection p{Eigen::VectorXcd::Zero(n + 1), 0.0};
  for (Eigen::Index i = 0; i < f.amps().size(); ++i) {
    p.amps(std::popcount(static_cast<unsigned>(i))) += f.amps()(i);
  }
  Eigen::VectorXd inv_sqrt_binom(n + 1);
  for (int m = 0; m <= n; ++m) {
    inv_sqrt_binom(m) = std::exp(-log_sqrt_binomial(n, m));
    p.amps(m) *= inv_sqrt_binom(m);
  }
  // Distance to the symmetric sector, summed directly to avoid cancellation.
  double outside = 0.0;
  for (Eigen::Index i = 0; i < f.amps().size(); ++i) {
    const int m = std::popcount(static_cast<unsigned>(i));
    outside += std::norm(f.amps()(i) - p.amps(m) * inv_sqrt_binom(m));
  }
  p.residual_norm = std::sqrt(outside);
  return p;
}

Verification verify_sequence(int n_qubits, std::span<const Pulse> pulses) {
  check_size(n_qubits);
  FullState full(n_qubits);
  SymmetricState sym = dicke(n_qubits, 0);
  Verification v{0.0, 0.0};
  for (const Pulse& pulse : pulses) {
    if (pulse.is_scatter()) {
      full = full_chi(full, pulse.m);
      sym = phase_flip(sym, pulse.m);
    } else {
      full = full_rotation(full, pulse.angle);
      sym = apply_rotation(sym, pulse.angle);
    }
    const Projection p = project(full);
    v.max_deviation = std::max(v.max_deviation, (p.amps - sym.amps()).norm());
    v.max_residual = std::max(v.max_residual, p.residual_norm);
  }
  return v;
}

Verification verify_protocol(const ProtocolPlan& plan) {
  return verify_sequence(plan.n_qubits, plan.pulses);
}

}  // namespace grovercav::oracle

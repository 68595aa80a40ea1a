#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "reference.hpp"

#include "grovercav/planner.hpp"

using namespace grovercav;

TEST_CASE("exact-hit overlap") {
  for (int k = 0; k <= 6; ++k) {
    CHECK(exact_hit_overlap(k) == doctest::Approx(std::sin(M_PI / (2.0 * (2 * k + 1)))));
  }
  CHECK(exact_hit_overlap(0) == doctest::Approx(1.0));
  CHECK(exact_hit_overlap(1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(exact_hit_overlap(-1), DomainError);
}

TEST_CASE("Dicke overlap against a long-double binomial") {
  for (int n : {4, 25, 100, 400}) {
    for (int m : {0, 1, n / 3, n / 2, n}) {
      for (double phi : {0.1, 0.9, 1.6, 3.0}) {
        const double expected = double(ref::css_amps(n, phi)[m]);
        CHECK(std::abs(dicke_overlap(n, m, phi) - std::abs(expected)) < 1e-13);
      }
    }
  }
  CHECK_THROWS_AS(dicke_overlap(4, 2, -0.1), DomainError);
  CHECK_THROWS_AS(dicke_overlap(4, 5, 1.0), DomainError);
}

TEST_CASE("optimal angle maximizes the overlap") {
  for (int n : {7, 30, 101}) {
    for (int m = 0; m <= n; m += std::max(1, n / 7)) {
      const double phi = optimal_phi(n, m);
      // tan^2(phi/2) = m/(N-m), written so that m = N stays finite.
      CHECK(std::pow(std::sin(phi / 2), 2) == doctest::Approx(double(m) / n).epsilon(1e-12));
      CHECK(dicke_overlap(n, m, phi) ==
            doctest::Approx(ref::max_dicke_overlap(n, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("minimal step count matches a brute-force scan") {
  // Independent: maximize the overlap numerically, then invert the Grover law.
  CHECK(min_steps_dicke(100, 50) == ref::steps_for_overlap(ref::max_dicke_overlap(100, 50)));
  CHECK(min_steps_dicke(100, 50) == 3);
  for (int n : {3, 10, 37, 120}) {
    for (int m = 0; m <= n; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      CHECK(min_steps_dicke(n, m) == ref::steps_for_overlap(ref::max_dicke_overlap(n, m)));
    }
  }
  CHECK(min_steps_dicke(9, 0) == 0);
  CHECK(min_steps_dicke(9, 9) == 0);
}

TEST_CASE("solved angle lands on the exact-hit overlap") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + int(rng() % 300);
    const int m = int(rng() % (n + 1));
    const int kmin = min_steps_dicke(n, m);
    for (int k = kmin; k <= kmin + 2; ++k) {
      const double phi = solve_phi_dicke(n, m, k);
      CAPTURE(n);
      CAPTURE(m);
      CAPTURE(k);
      CHECK(std::abs(dicke_overlap(n, m, phi) - exact_hit_overlap(k)) < 1e-12);
      if (m > 0 && k > 0) CHECK(phi <= optimal_phi(n, m) + 1e-12);
    }
    if (kmin > 0) CHECK_THROWS_AS(solve_phi_dicke(n, m, kmin - 1), InfeasibleError);
  }
}

TEST_CASE("GHZ overlaps against the matrix exponential") {
  for (int n : {2, 4, 10, 24}) {
    for (double phi : {0.4, 1.0, M_PI / 2}) {
      const Eigen::VectorXd v = ref::rotation_expm(n, -phi).col(n / 2);
      const double plus = std::abs(v(0) + v(n)) / std::sqrt(2.0);
      const double minus = std::abs(v(0) - v(n)) / std::sqrt(2.0);
      const double matched = ghz_sign(n) > 0 ? plus : minus;
      const double other = ghz_sign(n) > 0 ? minus : plus;
      CAPTURE(n);
      CHECK(std::abs(ghz_overlap(n, phi) - matched) < 1e-12);
      CHECK(std::abs(ghz_antisymmetric_overlap(n, phi) - other) < 1e-12);
      CHECK(other < 1e-12);
    }
  }
  CHECK(ghz_sign(4) == 1);
  CHECK(ghz_sign(6) == -1);
  CHECK_THROWS_AS(ghz_overlap(7, 1.0), DomainError);
  CHECK_THROWS_AS(min_steps_ghz(7), DomainError);
}

TEST_CASE("GHZ angle solve") {
  for (int n = 2; n <= 64; n += 2) {
    const int k = min_steps_ghz(n);
    const double phi = solve_phi_ghz(n, k);
    CHECK(std::abs(ghz_overlap(n, phi) - exact_hit_overlap(k)) < 1e-12);
    CHECK(phi <= M_PI / 2 + 1e-12);
  }
}

TEST_CASE("step-count estimates") {
  CHECK(estimate_steps(16.0) == doctest::Approx(1.24 * 2 - 0.5));
  CHECK(estimate_steps_half(256.0) == doctest::Approx(0.88 * 4 - 0.5));
}

TEST_CASE("contour table") {
  const auto rows = contour_table(60, 3);
  int expected_rows = 0;
  for (int n = 3; n <= 60; ++n) expected_rows += n + 1;
  REQUIRE(int(rows.size()) == expected_rows);
  CHECK(rows.front().n_qubits == 3);
  CHECK(rows.front().m == 0);
  for (const auto& r : rows) {
    CHECK(r.k == min_steps_dicke(r.n_qubits, r.m));
    if (r.m == 1) CHECK(r.k == 1);
  }
  // Deterministic regardless of the thread count.
  const auto serial = contour_table(60, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].k == serial[i].k);

  std::ostringstream os;
  write_contour_csv(os, contour_table(3, 1));
  CHECK(os.str().rfind("N,m,k\n3,0,0\n", 0) == 0);
}

TEST_CASE("plan layout") {
  SUBCASE("Dicke") {
    const ProtocolPlan p = plan(20, Target::dicke(10));
    CHECK(p.k == min_steps_dicke(20, 10));
    CHECK(p.grover_start == 1);
    CHECK(p.pulses_per_step == 4);
    REQUIRE(int(p.pulses.size()) == 1 + 4 * p.k);
    CHECK(p.pulses[0].kind == Pulse::Kind::Rotate);
    CHECK(p.pulses[0].angle == p.phi);
    CHECK(p.pulses[1].is_scatter());
    CHECK(p.pulses[1].m == 10);
    CHECK(p.pulses[2].angle == -p.phi);
    CHECK(p.pulses[3].m == 0);
    CHECK(p.scatter_count() == 2 * p.k);
    CHECK(std::sin(p.theta / 2) == doctest::Approx(exact_hit_overlap(p.k)));
  }
  SUBCASE("override") {
    const ProtocolPlan p = plan(20, Target::dicke(10), 4);
    CHECK(p.k == 4);
    CHECK_THROWS_AS(plan(20, Target::dicke(10), 1), InfeasibleError);
  }
  SUBCASE("GHZ") {
    const ProtocolPlan p = plan(12, Target::ghz());
    CHECK(p.pulses_per_step == 5);
    CHECK(p.target.sign == ghz_sign(12));
    CHECK(int(p.pulses.size()) == p.grover_start + 5 * p.k);
    CHECK(p.prep_k == min_steps_dicke(12, 6));
    CHECK(p.grover_scatter_count() == 3 * p.k);
  }
  CHECK_THROWS_AS(plan(7, Target::ghz()), DomainError);
  CHECK_THROWS_AS(plan(0, Target::dicke(0)), DomainError);
  CHECK_THROWS_AS(plan(5, Target::dicke(6)), DomainError);
}

TEST_CASE("plan JSON round trip") {
  for (const ProtocolPlan& p : {plan(30, Target::dicke(4)), plan(10, Target::ghz())}) {
    const ProtocolPlan back = plan_from_json(to_json(p));
    CHECK(back.n_qubits == p.n_qubits);
    CHECK(back.k == p.k);
    CHECK(back.phi == p.phi);
    CHECK(back.target.kind == p.target.kind);
    CHECK(back.target.sign == p.target.sign);
    REQUIRE(back.pulses.size() == p.pulses.size());
    for (std::size_t i = 0; i < p.pulses.size(); ++i) {
      CHECK(back.pulses[i].kind == p.pulses[i].kind);
      CHECK(back.pulses[i].angle == p.pulses[i].angle);
      CHECK(back.pulses[i].m == p.pulses[i].m);
    }
  }
  CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse(R"({"n_qubits": 3})")), DomainError);
}

TEST_CASE("overlap examples") {
  CHECK(dicke_overlap(4, 2, M_PI / 2) == doctest::Approx(std::sqrt(6.0) / 4).epsilon(1e-15));
  CHECK(dicke_overlap(17, 0, 0.0) == 1.0);
  CHECK(optimal_phi(40, 20) == doctest::Approx(M_PI / 2).epsilon(1e-15));
  CHECK(optimal_phi(4, 1) == doctest::Approx(M_PI / 3).epsilon(1e-14));
  // W-state overlap tends to e^{-1/2}; the gap shrinks like 1/N.
  CHECK(std::abs(dicke_overlap(10000, 1, optimal_phi(10000, 1)) - std::exp(-0.5)) < 1e-4);
}

TEST_CASE("step-count examples") {
  for (int n = 2; n <= 500; ++n) {
    CHECK(min_steps_dicke(n, 1) == 1);
    CHECK(min_steps_dicke(n, 0) == 0);
  }
  const double phi = solve_phi_dicke(100, 50, 3);
  CHECK(std::sin(7 * std::asin(dicke_overlap(100, 50, phi))) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(estimate_steps_half(100) == doctest::Approx(0.88 * std::sqrt(10.0) - 0.5));
}

TEST_CASE("three-qubit W angle against a dense scan") {
  // sqrt(3) cos^2(phi/2) sin(phi/2) = 1/2, first crossing from phi = 0.
  auto f = [](double p) { return std::sqrt(3.0) * std::pow(std::cos(p / 2), 2) * std::sin(p / 2); };
  const int grid = 200000;
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= grid; ++i) {
    hi = M_PI * i / grid;
    if (f(hi) >= 0.5) break;
    lo = hi;
  }
  const double phi = solve_phi_dicke(3, 1, 1);
  CHECK(phi >= lo - 1e-12);
  CHECK(phi <= hi + 1e-12);
  CHECK(std::abs(f(phi) - 0.5) < 1e-12);
}

TEST_CASE("property: step counts are symmetric and monotone in min(m, N-m)") {
  for (int n : {10, 57, 200, 333}) {
    for (int m = 0; m <= n; ++m) CHECK(min_steps_dicke(n, m) == min_steps_dicke(n, n - m));
    for (int m = 0; m < n / 2; ++m) CHECK(min_steps_dicke(n, m) <= min_steps_dicke(n, m + 1));
  }
}

TEST_CASE("GHZ examples") {
  for (int n = 2; n <= 40; n += 2) {
    CHECK(ghz_overlap(n, 0.0) == 0.0);
    for (double phi : {0.3, 1.2, 2.9}) {
      const Eigen::MatrixXd r = rotation_matrix(n, -phi).mat();
      CHECK(std::abs(std::abs(r(0, n / 2)) - std::abs(r(n, n / 2))) < 1e-13);
    }
  }
  for (int n = 4; n <= 512; n += 4) CHECK(min_steps_ghz(n) <= min_steps_dicke(n, n / 2));

  // N = 4 by dense (k, phi) feasibility scan with either GHZ sign.
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const Eigen::VectorXd v = ref::rotation_expm(4, -M_PI * i / 20000).col(2);
    best = std::max({best, std::abs(v(0) + v(4)) / std::sqrt(2.0),
                     std::abs(v(0) - v(4)) / std::sqrt(2.0)});
  }
  CHECK(min_steps_ghz(4) == ref::steps_for_overlap(best));
}

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "reference.hpp"

#include "grovercav/symspace.hpp"

using namespace grovercav;

namespace {

SymmetricState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n + 1);
  for (int m = 0; m <= n; ++m) v(m) = {g(rng), g(rng)};
  return SymmetricState::normalized(n, v);
}

}  // namespace

TEST_CASE("state construction validates size and norm") {
  CHECK_THROWS_AS(SymmetricState(3, Eigen::VectorXcd::Ones(3)), DomainError);
  CHECK_THROWS_AS(SymmetricState(3, Eigen::VectorXcd::Ones(4)), DomainError);
  CHECK_THROWS_AS(SymmetricState::normalized(3, Eigen::VectorXcd::Zero(4)), DomainError);
  CHECK_THROWS_AS(dicke(4, 5), DomainError);
  CHECK_THROWS_AS(dicke(4, -1), DomainError);

  const SymmetricState d = dicke(6, 2);
  CHECK(d.dim() == 7);
  CHECK(d[2] == cplx(1.0));
  CHECK(std::abs(d.inner(dicke(6, 3))) == 0.0);
}

TEST_CASE("rotation matches the matrix exponential of the generator") {
  for (int n : {1, 2, 5, 12, 31, 60}) {
    for (double phi : {0.3, 1.1, M_PI / 2, 2.9, -1.7, 5.5}) {
      const Eigen::MatrixXd expected = ref::rotation_expm(n, phi);
      const Eigen::MatrixXd got = rotation_matrix(n, phi).mat();
      CAPTURE(n);
      CAPTURE(phi);
      CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("rotated vacuum is the coherent spin state") {
  for (int n : {3, 40, 200}) {
    for (double phi : {0.2, 1.3, 2.8}) {
      const auto expected = ref::css_amps(n, phi);
      const SymmetricState css = css_state(n, phi);
      const SymmetricState rotated = apply_rotation(dicke(n, 0), phi);
      for (int m = 0; m <= n; ++m) {
        CHECK(std::abs(css[m] - cplx(double(expected[m]))) < 1e-12);
        CHECK(std::abs(rotated[m] - css[m]) < 1e-11);
      }
    }
  }
}

TEST_CASE("large-N rotations stay orthogonal and compose") {
  for (int n : {256, 512}) {
    const Eigen::MatrixXd a = rotation_matrix(n, 0.7).mat();
    const Eigen::MatrixXd b = rotation_matrix(n, 1.9).mat();
    const Eigen::MatrixXd ab = rotation_matrix(n, 2.6).mat();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n + 1, n + 1);
    CAPTURE(n);
    CHECK((a.transpose() * a - id).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a * b - ab).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((rotation_matrix(n, -0.7).mat() - a.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((rotation_matrix(20, 0.0).mat() - Eigen::MatrixXd::Identity(21, 21)).norm() == 0.0);
  // Period 4 pi
  CHECK((rotation_matrix(20, 4 * M_PI + 0.4).mat() - rotation_matrix(20, 0.4).mat())
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("property: rotations and reflections preserve the norm") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-6.0, 6.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + int(rng() % 150);
    const SymmetricState s = random_state(n, rng);
    const SymmetricState axis = random_state(n, rng);
    const SymmetricState r = apply_rotation(s, angle(rng));
    CHECK(std::abs(r.norm() - 1.0) < 1e-11);
    const SymmetricState refl = reflection_about(s, axis);
    CHECK(std::abs(refl.norm() - 1.0) < 1e-11);
    // Reflecting twice is the identity.
    const SymmetricState back = reflection_about(refl, axis);
    CHECK((back.amps() - s.amps()).norm() < 1e-11);
  }
}

TEST_CASE("phase flip equals the reflection about a Dicke state") {
  std::mt19937_64 rng(11);
  const SymmetricState s = random_state(9, rng);
  for (int m = 0; m <= 9; ++m) {
    const SymmetricState flipped = phase_flip(s, m);
    const SymmetricState refl = reflection_about(s, dicke(9, m));
    CHECK((flipped.amps() - refl.amps()).norm() < 1e-12);
    CHECK(flipped[m] == -s[m]);
  }
  CHECK_THROWS_AS(phase_flip(s, 10), DomainError);
  CHECK_THROWS_AS(reflection_about(s, dicke(8, 0)), DomainError);
}

TEST_CASE("GHZ state") {
  const SymmetricState plus = ghz_state(6, 1);
  const SymmetricState minus = ghz_state(6, -1);
  CHECK(std::abs(plus[0] - cplx(M_SQRT1_2)) < 1e-15);
  CHECK(std::abs(minus[6] + cplx(M_SQRT1_2)) < 1e-15);
  CHECK(std::abs(plus.inner(minus)) < 1e-15);
  CHECK_THROWS_AS(ghz_state(6, 0), DomainError);
}

TEST_CASE("density matrix helpers") {
  std::mt19937_64 rng(3);
  const SymmetricState s = random_state(5, rng);
  const SymDensityMatrix rho = SymDensityMatrix::from_pure(s);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
  CHECK(std::abs(rho.expectation(s) - 1.0) < 1e-12);
  CHECK(rho.hermiticity_error() < 1e-15);
  CHECK(rho.min_eigenvalue() > -1e-12);

  const RotationMatrix r = rotation_matrix(5, 0.9);
  const SymDensityMatrix rotated = r.conjugate(rho);
  CHECK(std::abs(rotated.expectation(r.apply(s)) - 1.0) < 1e-12);
  CHECK_THROWS_AS(SymDensityMatrix(5, Eigen::MatrixXcd::Zero(5, 5)), DomainError);
}

TEST_CASE("Husimi Q function") {
  SUBCASE("Dicke states are azimuthally symmetric") {
    const QGrid q = husimi_q(dicke(8, 3), 21, 16);
    for (const auto& row : q.values) {
      for (double v : row) CHECK(std::abs(v - row.front()) < 1e-12);
    }
  }
  SUBCASE("a coherent state peaks at its own polar angle") {
    const int n_beta = 241;
    const double phi = M_PI * 92 / (n_beta - 1);  // on the grid, so the max is exactly 1
    const QGrid q = husimi_q(css_state(20, phi), n_beta, 12);
    CHECK(q.betas.front() == 0.0);
    CHECK(q.betas.back() == doctest::Approx(M_PI));
    CHECK(q.phi_azs.back() < 2 * M_PI);
    double best = -1.0, best_beta = 0.0;
    for (int i = 0; i < n_beta; ++i) {
      if (q.values[i][0] > best) best = q.values[i][0], best_beta = q.betas[i];
    }
    CHECK(best == doctest::Approx(1.0));
    CHECK(std::abs(best_beta - phi) < M_PI / (n_beta - 1));
    // Independent value: |<css(b)|css(phi)>|^2 = cos^{2N}((b - phi)/2).
    for (int i = 0; i < n_beta; i += 10) {
      const double expected = std::pow(std::cos(0.5 * (q.betas[i] - phi)), 40);
      CHECK(std::abs(q.values[i][0] - expected) < 1e-10);
    }
  }
  SUBCASE("CSV layout") {
    std::ostringstream os;
    write_qgrid_csv(os, husimi_q(ghz_state(4, 1), 3, 2));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "beta,phi_az,q");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6);
  }
}

TEST_CASE("basis and coherent-state examples") {
  CHECK(dicke(4, 0).amps() == Eigen::VectorXcd::Unit(5, 0));
  CHECK(dicke(4, 4).amps() == Eigen::VectorXcd::Unit(5, 4));
  CHECK(dicke(10, 3).inner(dicke(10, 7)) == cplx(0.0));
  CHECK(css_state(9, 0.0).amps() == dicke(9, 0).amps());

  const double expected[] = {0.25, 0.5, std::sqrt(6.0) / 4, 0.5, 0.25};
  const SymmetricState half = css_state(4, M_PI / 2);
  const Eigen::MatrixXd r = rotation_matrix(4, M_PI / 2).mat();
  for (int m = 0; m <= 4; ++m) {
    CHECK(std::abs(half[m] - cplx(expected[m])) < 1e-15);
    CHECK(std::abs(r(m, 0) - expected[m]) < 1e-15);
  }
  CHECK(std::abs(css_state(500, 1.3).norm() - 1.0) < 1e-10);
  CHECK((apply_rotation(dicke(6, 0), 0.77).amps() - css_state(6, 0.77).amps()).norm() < 1e-14);

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(101, 101);
  CHECK((rotation_matrix(100, 0.7).mat() * rotation_matrix(100, -0.7).mat() - id)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("property: rotation column 0 reproduces the binomial amplitudes up to N = 500") {
  for (int n = 1; n <= 500; n += (n < 40 ? 1 : 23)) {
    for (double phi = 0.1; phi <= 3.0 + 1e-9; phi += 0.35) {
      const Eigen::MatrixXd r = rotation_matrix(n, phi).mat();
      const auto exact = ref::css_amps(n, phi);
      double worst = 0.0;
      for (int m = 0; m <= n; ++m) {
        if (std::abs(double(exact[m])) < 1e-12) continue;
        worst = std::max(worst, std::abs(r(m, 0) / double(exact[m]) - 1.0));
      }
      CAPTURE(n);
      CAPTURE(phi);
      CHECK(worst < 1e-9);
    }
  }
  // The final N is included explicitly.
  const Eigen::MatrixXd r = rotation_matrix(500, 1.3).mat();
  CHECK((r.col(0) - css_state(500, 1.3).amps().real()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: inverse rotation and unitarity at N = 500") {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 5; ++trial) {
    const SymmetricState s = random_state(500, rng);
    const SymmetricState there = apply_rotation(s, 1.1 + trial);
    CHECK(std::abs(there.norm() - 1.0) < 1e-10);
    CHECK((apply_rotation(there, -(1.1 + trial)).amps() - s.amps()).norm() < 1e-10);
  }
}

TEST_CASE("phase flip and reflection examples") {
  const SymmetricState d = dicke(5, 2);
  CHECK(phase_flip(d, 2).amps() == (-d).amps());
  CHECK(phase_flip(d, 3).amps() == d.amps());

  std::mt19937_64 rng(4);
  const SymmetricState s = random_state(7, rng);
  CHECK(phase_flip(phase_flip(s, 4), 4).amps() == s.amps());
  // Commutes with any operator diagonal in m.
  Eigen::VectorXcd diag(8);
  for (int m = 0; m <= 7; ++m) diag(m) = std::polar(1.0, 0.3 * m * m);
  const SymmetricState ds(7, diag.cwiseProduct(s.amps()));
  const SymmetricState fd(7, diag.cwiseProduct(phase_flip(s, 4).amps()));
  CHECK((phase_flip(ds, 4).amps() - fd.amps()).norm() < 1e-14);

  const SymmetricState a = random_state(7, rng);
  CHECK((reflection_about(a, a).amps() + a.amps()).norm() < 1e-12);
  // Component orthogonal to a is left alone.
  const Eigen::VectorXcd orth = s.amps() - a.inner(s) * a.amps();
  const SymmetricState o = SymmetricState::normalized(7, orth);
  CHECK((reflection_about(o, a).amps() - o.amps()).norm() < 1e-12);
}

TEST_CASE("product of two reflections rotates by a fixed angle") {
  // i = css at angle phi, t = Dicke m. In span{i, t} the product
  // R_i R_t advances the target overlap as sin((2j+1) theta/2).
  const int n = 30, m = 4;
  const double phi = 0.6;
  const SymmetricState t = dicke(n, m);
  const SymmetricState i = css_state(n, phi);
  const double half_theta = std::asin(std::abs(i[m]));
  SymmetricState s = i;
  for (int j = 0; j <= 5; ++j) {
    CHECK(std::abs(std::abs(s[m]) - std::abs(std::sin((2 * j + 1) * half_theta))) < 1e-12);
    s = reflection_about(reflection_about(s, t), i);
  }
}

TEST_CASE("GHZ overlaps and Q-function poles") {
  for (int n : {2, 9, 40}) {
    CHECK(std::abs(std::abs(ghz_state(n, 1).inner(dicke(n, 0))) - M_SQRT1_2) < 1e-15);
    CHECK(ghz_state(n, 1).norm() == doctest::Approx(1.0));
  }
  const QGrid q = husimi_q(ghz_state(100, 1), 181, 8);
  double best = 0.0;
  int best_i = -1;
  for (int i = 0; i < 181; ++i) {
    if (q.values[i][0] > best) best = q.values[i][0], best_i = i;
  }
  // Two equal antipodal peaks, nothing comparable in between.
  CHECK(q.values.front()[0] == doctest::Approx(1.0));
  CHECK(q.values.back()[0] == doctest::Approx(1.0));
  CHECK((best_i == 0 || best_i == 180));
  CHECK(q.values[90][0] < 1e-6);

  const QGrid d0 = husimi_q(dicke(12, 0), 37, 6);
  for (int i = 1; i < 37; ++i) CHECK(d0.values[i][0] < d0.values[0][0]);
}

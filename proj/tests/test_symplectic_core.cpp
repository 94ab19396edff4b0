#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gmps/gaussian_states.hpp"
#include "gmps/symplectic_core.hpp"
#include "oracles.hpp"

using namespace gmps;

TEST_CASE("SymMatrix symmetrizes exactly and validates shape") {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd m(5, 5);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) m(i, j) = gauss(rng);
    SymMatrix sm(m);
    REQUIRE((sm.matrix() - sm.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE_THROWS_AS(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  REQUIRE_THROWS_AS(SymMatrix(Eigen::MatrixXd::Zero(3, 3)).n_modes(), Error);
}

TEST_CASE("SymplecticForm satisfies Omega^2 = -I and Omega^T = -Omega") {
  for (Index n : {1, 2, 5}) {
    const Eigen::MatrixXd om = SymplecticForm(n).matrix();
    REQUIRE((om * om + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((om.transpose() + om).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE_THROWS_AS(SymplecticForm(0), Error);
}

TEST_CASE("direct_sum embeds by mode label") {
  const SymMatrix i2(Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(direct_sum({i2}).matrix() == Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(direct_sum({i2, i2}).matrix() == Eigen::MatrixXd::Identity(4, 4));

  // round trip through reduce: each copy of the block is recovered exactly
  const GaussianState block = building_block({1.7, 1.3});
  const SymMatrix joined = direct_sum({block.cm(), block.cm(), block.cm()});
  const GaussianState joined_state(joined);
  for (Index k = 0; k < 3; ++k) {
    const GaussianState back = reduce(joined_state, {3 * k, 3 * k + 1, 3 * k + 2});
    REQUIRE((back.matrix() - block.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("schur_complement basics") {
  SECTION("identity: zero cross block leaves the kept block alone") {
    const SymMatrix m(Eigen::MatrixXd::Identity(4, 4));
    REQUIRE((schur_complement(m, {0}).matrix() - Eigen::MatrixXd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  SECTION("block diagonal input returns A") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = 2.0;
    m(2, 2) = 3.0;   // mode 0 (q, p)
    m(1, 1) = 5.0;
    m(3, 3) = 7.0;   // mode 1
    const SymMatrix out = schur_complement(SymMatrix(m), {0});
    Eigen::MatrixXd expect(2, 2);
    expect << 2.0, 0.0, 0.0, 3.0;
    REQUIRE((out.matrix() - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("4x4 against the 2x2 cofactor-inverse oracle") {
    std::mt19937 rng(5);
    for (int t = 0; t < 25; ++t) {
      const Eigen::MatrixXd g = oracles::random_valid_cm(2, rng);
      const SymMatrix out = schur_complement(SymMatrix(g), {0});
      // keep mode 0 -> rows (0, 2); discard mode 1 -> rows (1, 3)
      Eigen::Matrix2d a, b, d;
      a << g(0, 0), g(0, 2), g(2, 0), g(2, 2);
      b << g(0, 1), g(0, 3), g(2, 1), g(2, 3);
      d << g(1, 1), g(1, 3), g(3, 1), g(3, 3);
      const Eigen::Matrix2d expect = a - b * oracles::inverse_2x2(d) * b.transpose();
      REQUIRE((out.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("nested elimination equals joint elimination") {
    std::mt19937 rng(7);
    for (int t = 0; t < 10; ++t) {
      const SymMatrix g(oracles::random_valid_cm(4, rng));
      const SymMatrix joint = schur_complement(g, {0, 1});
      const SymMatrix step1 = schur_complement(g, {0, 1, 2});
      const SymMatrix step2 = schur_complement(step1, {0, 1});
      REQUIRE((joint.matrix() - step2.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SECTION("singular discard block is rejected") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(1, 1) = 0.0;
    m(3, 3) = 0.0;  // discard block (mode 1) singular
    REQUIRE_THROWS_AS(schur_complement(SymMatrix(m), {0}), SingularBlock);
  }
}

TEST_CASE("limit_schur_complement") {
  std::mt19937 rng(13);
  std::normal_distribution<double> gauss;
  auto random_sym = [&](Index n) {
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = gauss(rng);
    return Eigen::MatrixXd(0.5 * (m + m.transpose()));
  };
  auto random_projector = [&](Index n, Index rank) {
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd v = q.leftCols(rank);
    return Eigen::MatrixXd(v * v.transpose());
  };

  SECTION("P = I returns A") {
    const Eigen::MatrixXd a = random_sym(4);
    const Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 6);
    const SymMatrix out = limit_schur_complement(
        SymMatrix(a), b, SymMatrix(random_sym(6)), SymMatrix(Eigen::MatrixXd::Identity(6, 6)));
    REQUIRE((out.matrix() - SymMatrix(a).matrix()).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("P = 0 agrees with the plain Schur complement") {
    for (int t = 0; t < 10; ++t) {
      const Eigen::MatrixXd g = oracles::random_valid_cm(3, rng);
      const SymMatrix m(g);
      const SymMatrix plain = schur_complement(m, {0});
      const auto ik = detail::phase_indices({0}, 3);
      const auto id = detail::phase_indices({1, 2}, 3);
      const Eigen::MatrixXd a = detail::submatrix(g, ik, ik);
      const Eigen::MatrixXd b = detail::submatrix(g, ik, id);
      const Eigen::MatrixXd d = detail::submatrix(g, id, id);
      const SymMatrix lim = limit_schur_complement(SymMatrix(a), b, SymMatrix(d),
                                                   SymMatrix(Eigen::MatrixXd::Zero(4, 4)));
      REQUIRE((lim.matrix() - plain.matrix()).cwiseAbs().maxCoeff() < 1e-13);
    }
  }

  SECTION("agrees with finite-lambda evaluation at lambda = 1e8") {
    for (int t = 0; t < 25; ++t) {
      const Eigen::MatrixXd a = random_sym(4);
      const Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 8);
      Eigen::MatrixXd d = random_sym(8);
      d += (d.cwiseAbs().rowwise().sum().maxCoeff() + 1.0) *
           Eigen::MatrixXd::Identity(8, 8);  // make D positive definite
      const Eigen::MatrixXd p = random_projector(8, 3);
      const SymMatrix lim = limit_schur_complement(SymMatrix(a), b, SymMatrix(d), SymMatrix(p));
      const Eigen::MatrixXd fin = oracles::finite_lambda_schur(a, b, d, p, 1e8);
      REQUIRE((lim.matrix() - fin).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  SECTION("degenerate restricted block is detected") {
    const Eigen::MatrixXd p = random_projector(6, 2);
    // D_finite supported on range(P) only: Q D Q = 0
    const Eigen::MatrixXd d = p * random_sym(6) * p;
    REQUIRE_THROWS_AS(limit_schur_complement(SymMatrix(random_sym(3)),
                                             Eigen::MatrixXd::Random(3, 6), SymMatrix(d),
                                             SymMatrix(p)),
                      DegenerateLimit);
  }

  SECTION("non-projector P is rejected") {
    REQUIRE_THROWS_AS(limit_schur_complement(SymMatrix(random_sym(3)),
                                             Eigen::MatrixXd::Random(3, 4),
                                             SymMatrix(random_sym(4)),
                                             SymMatrix(2.0 * Eigen::MatrixXd::Identity(4, 4))),
                      Error);
  }
}

TEST_CASE("symplectic_eigenvalues") {
  SECTION("vacuum and thermal scaling") {
    const auto nu1 = symplectic_eigenvalues(SymMatrix(Eigen::MatrixXd::Identity(6, 6)));
    for (double v : nu1) REQUIRE(v == Catch::Approx(1.0).margin(1e-14));
    const auto nu2 = symplectic_eigenvalues(SymMatrix(2.5 * Eigen::MatrixXd::Identity(4, 4)));
    for (double v : nu2) REQUIRE(v == Catch::Approx(2.5).margin(1e-12));
  }
  SECTION("two-mode squeezed state is pure for any r") {
    for (double r : {0.0, 0.4, 1.1, 3.0}) {
      const auto nu = symplectic_eigenvalues(tmss(r).cm());
      REQUIRE(nu.size() == 2);
      for (double v : nu) REQUIRE(v == Catch::Approx(1.0).margin(1e-9));
    }
  }
  SECTION("rejects non positive definite input") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 0) = -1.0;
    REQUIRE_THROWS_AS(symplectic_eigenvalues(SymMatrix(m)), NotPositiveDefinite);
  }
  SECTION("invariant under symplectic conjugation") {
    std::mt19937 rng(23);
    for (int t = 0; t < 20; ++t) {
      const Eigen::MatrixXd g = oracles::random_valid_cm(3, rng);
      const Eigen::MatrixXd s = oracles::random_symplectic(3, rng);
      const auto nu_a = symplectic_eigenvalues(SymMatrix(g));
      const auto nu_b = symplectic_eigenvalues(SymMatrix(s * g * s.transpose()));
      for (size_t i = 0; i < nu_a.size(); ++i) {
        REQUIRE(nu_b[i] == Catch::Approx(nu_a[i]).margin(1e-9));
      }
    }
  }
  SECTION("symmetric route matches the general-eigensolver oracle") {
    std::mt19937 rng(29);
    for (int t = 0; t < 20; ++t) {
      const Eigen::MatrixXd g = oracles::random_valid_cm(2, rng);
      const auto nu = symplectic_eigenvalues(SymMatrix(g));
      const Eigen::VectorXd ref = detail::symplectic_eigenvalues_general(g);
      for (Index i = 0; i < ref.size(); ++i) {
        REQUIRE(nu[static_cast<size_t>(i)] == Catch::Approx(ref(i)).margin(1e-9));
      }
    }
  }
}

TEST_CASE("is_valid_cm") {
  REQUIRE(is_valid_cm(SymMatrix(Eigen::MatrixXd::Identity(2, 2)), 1e-9));
  REQUIRE_FALSE(is_valid_cm(SymMatrix(0.5 * Eigen::MatrixXd::Identity(2, 2)), 1e-9));
  // physicality boundary s = s_min(x)
  REQUIRE(is_valid_cm(building_block({1.5, 2.0}).cm(), 1e-9));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmps/entanglement_analysis.hpp"
#include "gmps/gaussian_states.hpp"
#include "oracles.hpp"

using namespace gmps;

TEST_CASE("building_block vacuum point") {
  const GaussianState g = building_block({1.0, 1.0});
  REQUIRE((g.matrix() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("building_block covariances at (s, x) = (1.5, 2)") {
  // s = s_min(2): the t radicand vanishes, t = (x^2-1)/(4s) = 1/2 in both
  // sectors; u = +-sqrt(6)/2.
  const GaussianState g = building_block({1.5, 2.0});
  const double u = std::sqrt(6.0) / 2.0;
  REQUIRE(g.matrix()(0, 1) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(g.matrix()(3, 4) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(g.matrix()(0, 2) == Catch::Approx(u).margin(1e-12));
  REQUIRE(g.matrix()(1, 2) == Catch::Approx(u).margin(1e-12));
  REQUIRE(g.matrix()(3, 5) == Catch::Approx(-u).margin(1e-12));
  REQUIRE(g.matrix()(2, 2) == 2.0);
  REQUIRE(g.matrix()(5, 5) == 2.0);
  REQUIRE(g.matrix()(0, 3) == 0.0);  // no q-p cross terms
  for (double nu : symplectic_eigenvalues(g.cm())) {
    REQUIRE(nu == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("building_block purity and bisymmetry across the parameter range") {
  for (double x : {1.0, 1.3, 2.0, 5.0, 10.0}) {
    for (double ds : {0.0, 0.37, 2.0, 10.0}) {
      const double s = BuildingBlockParams::s_min(x) + ds;
      const GaussianState g = building_block({s, x});
      REQUIRE(g.matrix().determinant() == Catch::Approx(1.0).margin(1e-9));
      for (double nu : symplectic_eigenvalues(g.cm())) {
        REQUIRE(nu == Catch::Approx(1.0).margin(1e-9));
      }
      const GaussianState m1 = reduce(g, {0});
      const GaussianState m2 = reduce(g, {1});
      REQUIRE((m1.matrix() - m2.matrix()).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(m1.matrix()(0, 0) == s);
      // output port is diag(x, x)
      const GaussianState m3 = reduce(g, {2});
      REQUIRE((m3.matrix() - x * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("building_block rejects unphysical parameters") {
  REQUIRE_THROWS_AS(building_block({1.4, 2.0}), Unphysical);
  REQUIRE_THROWS_AS(building_block({3.0, 0.9}), Unphysical);
  REQUIRE_THROWS_MATCHES(building_block({1.4, 2.0}), Unphysical,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("s below s_min = 1.5")));
}

TEST_CASE("input-port entanglement grows with s at fixed x") {
  // min PPT symplectic eigenvalue of gamma_ss strictly decreasing in s
  double prev = 2.0;
  for (double s : {1.5, 2.0, 3.0, 5.0, 9.0, 15.0}) {
    const GaussianState gss = reduce(building_block({s, 2.0}), {0, 1});
    const double eta = ppt_eta(gss);
    REQUIRE(eta < prev);
    prev = eta;
  }
}

TEST_CASE("tmss") {
  SECTION("r = 0 is the two-mode vacuum") {
    REQUIRE((tmss(0.0).matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("r = 1.1 entries") {
    const GaussianState g = tmss(1.1);
    REQUIRE(g.matrix()(0, 0) == Catch::Approx(std::cosh(2.2)).epsilon(1e-15));
    REQUIRE(g.matrix()(0, 1) == Catch::Approx(std::sinh(2.2)).epsilon(1e-15));
    REQUIRE(g.matrix()(2, 3) == Catch::Approx(-std::sinh(2.2)).epsilon(1e-15));
    REQUIRE(g.matrix()(0, 2) == 0.0);
  }
  SECTION("det = 1; conditioning limits the resolvable range to r <~ 4") {
    for (double r : {0.0, 0.5, 1.1, 2.0, 3.0, 4.0}) {
      REQUIRE(tmss(r).matrix().determinant() == Catch::Approx(1.0).margin(1e-9));
    }
  }
  SECTION("negative r rejected") { REQUIRE_THROWS_AS(tmss(-0.1), Unphysical); }
}

TEST_CASE("reduce") {
  const GaussianState vac(SymMatrix(Eigen::MatrixXd::Identity(10, 10)));
  REQUIRE((reduce(vac, {1, 3, 4}).matrix() - Eigen::MatrixXd::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() == 0.0);

  const GaussianState half = reduce(tmss(0.9), {0});
  REQUIRE(half.matrix()(0, 0) == Catch::Approx(std::cosh(1.8)).epsilon(1e-15));
  REQUIRE(half.matrix()(1, 1) == Catch::Approx(std::cosh(1.8)).epsilon(1e-15));
  REQUIRE(half.matrix()(0, 1) == 0.0);

  REQUIRE_THROWS_AS(reduce(vac, {5}), IndexOutOfRange);
  REQUIRE_THROWS_AS(reduce(vac, {}), IndexOutOfRange);
}

TEST_CASE("partial_transpose") {
  const GaussianState vac(SymMatrix(Eigen::MatrixXd::Identity(8, 8)));
  REQUIRE((partial_transpose(vac, {0, 2}).matrix() - Eigen::MatrixXd::Identity(8, 8))
              .cwiseAbs()
              .maxCoeff() == 0.0);

  SECTION("tmss: min PPT symplectic eigenvalue is e^{-2r}") {
    for (double r : {0.3, 0.7, 1.1, 2.0}) {
      const SymMatrix pt = partial_transpose(tmss(r), {1});
      const auto nu = symplectic_eigenvalues(pt);
      REQUIRE(nu.front() == Catch::Approx(std::exp(-2.0 * r)).epsilon(1e-9));
    }
  }
  SECTION("involution: applying theta twice restores the CM exactly") {
    const GaussianState g = building_block({2.3, 1.8});
    const SymMatrix once = partial_transpose(g, {0, 2});
    const SymMatrix twice = partial_transpose(GaussianState(once), {0, 2});
    REQUIRE((twice.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE_THROWS_AS(partial_transpose(vac, {7}), IndexOutOfRange);
}

TEST_CASE("BondSpec") {
  REQUIRE(BondSpec::infinite().is_infinite());
  REQUIRE_FALSE(BondSpec::finite(1.1).is_infinite());
  REQUIRE(BondSpec::finite(1.1).r() == 1.1);
  // requests past r_cap route to the exact limit
  REQUIRE(BondSpec::finite(20.0).is_infinite());
  REQUIRE_THROWS_AS(BondSpec::finite(-0.5), Unphysical);
  REQUIRE_THROWS_AS(BondSpec::infinite().r(), Error);
}

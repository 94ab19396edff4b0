#pragma once

// The concrete Gaussian states of the construction: the bisymmetric
// three-mode building block, the two-mode squeezed bond, plus mode
// reductions and phase-space partial transposition.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmps/errors.hpp"
#include "gmps/symplectic_core.hpp"

namespace gmps {

// (s, x): single-mode mixedness of the two input-port modes (s) and of the
// output-port mode (x). Physical iff x >= 1 and s >= s_min(x) = (x+1)/2.
struct BuildingBlockParams {
  double s = 1.0;
  double x = 1.0;

  static double s_min(double x) { return 0.5 * (x + 1.0); }

  void validate() const {
    if (!(x >= 1.0)) throw Unphysical("building block: x must be >= 1");
    if (!(s >= s_min(x))) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "s below s_min = %g", s_min(x));
      throw Unphysical(std::string("building block: ") + buf);
    }
  }
};

// Bond squeezing: finite r or the infinite-squeezing limit. Finite requests
// beyond r_cap route to the exact limit; past cosh(2 r_cap) ~ 2e15 the
// finite-r covariances are no longer meaningfully representable in doubles.
class BondSpec {
 public:
  static constexpr double r_cap = 18.0;

  static BondSpec infinite() { return BondSpec(true, 0.0); }

  static BondSpec finite(double r) {
    if (!(r >= 0.0)) throw Unphysical("bond: r must be >= 0");
    if (r > r_cap) return infinite();
    return BondSpec(false, r);
  }

  bool is_infinite() const { return infinite_; }

  double r() const {
    if (infinite_) throw Error("BondSpec: finite r requested from infinite bond");
    return r_;
  }

 private:
  BondSpec(bool inf, double r) : infinite_(inf), r_(r) {}
  bool infinite_;
  double r_;
};

// Zero-mean Gaussian state, fully described by its CM.
class GaussianState {
 public:
  explicit GaussianState(SymMatrix cm) : cm_(std::move(cm)) {
    if (cm_.dim() % 2 != 0) throw Error("GaussianState: CM dimension must be even");
  }

  Index n_modes() const { return cm_.dim() / 2; }
  const SymMatrix& cm() const { return cm_; }
  const Eigen::MatrixXd& matrix() const { return cm_.matrix(); }

 private:
  SymMatrix cm_;
};

namespace detail {

template <typename S>
struct BlockEntries {
  S t_plus, t_minus, u_plus, u_minus;
};

// Clamp a radicand that is exactly zero in exact arithmetic but may round
// to a tiny negative value (e.g. at s = s_min when x+1 is not representable).
template <typename S>
S clamp_radicand(S v, S scale) {
  if (v < S(0)) {
    if (v < -S(1e-9) * scale) throw Unphysical("building block: negative radicand");
    return S(0);
  }
  return v;
}

// Covariances of the standard-form bisymmetric block:
//   t_pm = [x^2 - 1 pm sqrt(16 s^4 - 8 (x^2+1) s^2 + (x^2-1)^2)] / (4 s)
//   u_pm = (1/4) sqrt((x^2-1)/(s x)) [sqrt((x-2s)^2-1) pm sqrt((x+2s)^2-1)]
// The t radicand is evaluated in the factored form
// (2s-x-1)(2s+x+1)(2s-x+1)(2s+x-1), which is algebraically identical and
// free of the catastrophic cancellation the expanded form suffers near
// s = s_min and at large s.
template <typename S>
BlockEntries<S> building_block_entries(S s, S x) {
  const S f1 = 2 * s - x - 1;
  const S f2 = 2 * s + x + 1;
  const S f3 = 2 * s - x + 1;
  const S f4 = 2 * s + x - 1;
  const S scale4 = (f2 + 1) * (f2 + 1) * (f2 + 1) * (f2 + 1);
  const S rad_t = clamp_radicand(f1 * f2 * f3 * f4, scale4);
  const S root = std::sqrt(rad_t);
  BlockEntries<S> e;
  e.t_plus = (x * x - 1 + root) / (4 * s);
  e.t_minus = (x * x - 1 - root) / (4 * s);
  const S pref = S(0.25) * std::sqrt((x * x - 1) / (s * x));
  const S ra = clamp_radicand((x - 2 * s - 1) * (x - 2 * s + 1), scale4);  // (x-2s)^2 - 1
  const S rb = clamp_radicand((x + 2 * s - 1) * (x + 2 * s + 1), scale4);  // (x+2s)^2 - 1
  e.u_plus = pref * (std::sqrt(ra) + std::sqrt(rb));
  e.u_minus = pref * (std::sqrt(ra) - std::sqrt(rb));
  return e;
}

// Per-sector 3x3 blocks of the building block in block form: the q sector
// carries (s, t_plus, u_plus), the p sector (s, t_minus, u_minus).
template <typename S>
Eigen::Matrix<S, 3, 3> building_block_sector(S s, S x, S t, S u) {
  Eigen::Matrix<S, 3, 3> m;
  m << s, t, u, t, s, u, u, u, x;
  return m;
}

}  // namespace detail

// Pure bisymmetric three-mode block in standard form: modes 1 and 2 are
// the input port (equal reductions diag(s, s)), mode 3 the output port
// diag(x, x). Purity (all symplectic eigenvalues 1) is asserted after
// construction rather than trusted, with a tolerance scaled by the entry
// magnitude since the spectrum of a matrix with norm ||G|| cannot be
// resolved below ~||G||^2 * eps.
inline GaussianState building_block(const BuildingBlockParams& p) {
  p.validate();
  const auto e = detail::building_block_entries<double>(p.s, p.x);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  g.topLeftCorner(3, 3) = detail::building_block_sector<double>(p.s, p.x, e.t_plus, e.u_plus);
  g.bottomRightCorner(3, 3) =
      detail::building_block_sector<double>(p.s, p.x, e.t_minus, e.u_minus);
  SymMatrix cm(g);
  const double norm = g.cwiseAbs().maxCoeff();
  const double tol = std::max(1e-9, 1e3 * std::numeric_limits<double>::epsilon() * norm * norm);
  const auto nu = symplectic_eigenvalues(cm);
  for (double v : nu) {
    if (std::abs(v - 1.0) > tol) {
      throw Unphysical("building block: purity check failed (|nu-1| = " +
                       std::to_string(std::abs(v - 1.0)) + ")");
    }
  }
  return GaussianState(std::move(cm));
}

// Two-mode squeezed state: cosh(2r) on the diagonal, +sinh(2r) q-cross
// and -sinh(2r) p-cross. Pure for every r.
inline GaussianState tmss(double r) {
  if (!(r >= 0.0)) throw Unphysical("tmss: r must be >= 0");
  const double c = std::cosh(2.0 * r);
  const double sh = std::sinh(2.0 * r);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
  g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = c;
  g(0, 1) = g(1, 0) = sh;
  g(2, 3) = g(3, 2) = -sh;
  return GaussianState(SymMatrix(g));
}

// Marginal state on the kept modes (rows/columns of both quadratures).
inline GaussianState reduce(const GaussianState& g, const std::vector<Index>& modes) {
  if (modes.empty()) throw IndexOutOfRange("reduce: empty mode set");
  const auto idx = detail::phase_indices(modes, g.n_modes());
  return GaussianState(SymMatrix(detail::submatrix(g.matrix(), idx, idx)));
}

// theta g theta with theta flipping the p-quadrature sign of the listed
// modes. The result may violate the uncertainty principle; that violation
// is exactly the entanglement signal, so a bare SymMatrix is returned.
inline SymMatrix partial_transpose(const GaussianState& g, const std::vector<Index>& modes) {
  const Index n = g.n_modes();
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(2 * n);
  for (Index m : modes) {
    if (m < 0 || m >= n) throw IndexOutOfRange("partial_transpose: mode index out of range");
    theta(n + m) = -1.0;
  }
  return SymMatrix(theta.asDiagonal() * g.matrix() * theta.asDiagonal());
}

}  // namespace gmps

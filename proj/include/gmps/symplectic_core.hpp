#pragma once

// Matrix substrate for covariance-matrix work on N-mode states:
// symplectic form, mode-interleaved direct sums, Schur complements
// (including the singular infinite-squeezing limit), symplectic spectra
// and uncertainty-principle tests.
//
// Convention everywhere: quadratures ordered all-q-then-all-p, i.e. a CM
// on N modes is 2N x 2N with row/col k < N referring to q_k and N + k to
// p_k. Vacuum corresponds to the identity matrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gmps/errors.hpp"

namespace gmps {

using Index = Eigen::Index;

// Real symmetric matrix with symmetry enforced exactly at construction.
// Used for every covariance matrix as well as for the N x N circulant
// potential matrices, so the dimension is not restricted to be even here;
// mode-indexed operations check evenness themselves.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw Error("SymMatrix: matrix must be square and non-empty");
    }
    // (a+b)/2 == (b+a)/2 in IEEE arithmetic, so this is exactly symmetric.
    m_ = 0.5 * (m + m.transpose());
  }

  Index dim() const { return m_.rows(); }

  Index n_modes() const {
    if (dim() % 2 != 0) {
      throw Error("SymMatrix: mode count undefined for odd dimension");
    }
    return dim() / 2;
  }

  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

// Symplectic form Omega = [[0, I], [-I, 0]] in all-q-then-all-p ordering.
// Omega^T = -Omega and Omega^2 = -I.
class SymplecticForm {
 public:
  explicit SymplecticForm(Index n_modes) : n_(n_modes) {
    if (n_modes <= 0) throw Error("SymplecticForm: n_modes must be positive");
  }

  Index n_modes() const { return n_; }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
    om.topRightCorner(n_, n_) = Eigen::MatrixXd::Identity(n_, n_);
    om.bottomLeftCorner(n_, n_) = -Eigen::MatrixXd::Identity(n_, n_);
    return om;
  }

 private:
  Index n_;
};

namespace detail {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// Phase-space row/col indices of a mode list: all q first, then all p,
// preserving the order of `modes`.
inline std::vector<Index> phase_indices(const std::vector<Index>& modes, Index n_modes) {
  std::vector<Index> idx;
  idx.reserve(2 * modes.size());
  for (Index m : modes) {
    if (m < 0 || m >= n_modes) throw IndexOutOfRange("mode index out of range");
    idx.push_back(m);
  }
  for (Index m : modes) idx.push_back(n_modes + m);
  return idx;
}

template <typename MatT>
MatT submatrix(const MatT& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  MatT out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

// lim_{lambda->inf} A - B (D + lambda P)^{-1} B^T for an orthogonal
// projector P. With W an orthonormal basis of range(Q), Q = I - P, the
// limit equals A - (BW) (W^T D W)^{-1} (BW)^T, which is the restricted
// pseudo-inverse expression A - B Q (Q D Q)^+ Q B^T evaluated without
// manufacturing a numerical kernel. Templated so the ring builder can run
// it in extended precision; the inversion there is genuinely
// ill-conditioned at large squeezing.
template <typename S>
Mat<S> limit_schur_core(const Mat<S>& a, const Mat<S>& b, const Mat<S>& d, const Mat<S>& p,
                        double rank_rel_cutoff, double* cond_out = nullptr) {
  const Index nd = d.rows();
  Eigen::SelfAdjointEigenSolver<Mat<S>> ep(p);
  std::vector<Index> qcols;  // eigenvalues of a projector split at {0,1}
  for (Index i = 0; i < nd; ++i)
    if (ep.eigenvalues()(i) < S(0.5)) qcols.push_back(i);
  if (qcols.empty()) {
    if (cond_out) *cond_out = 1.0;
    return a;  // P = I: the whole block diverges
  }

  Mat<S> w(nd, static_cast<Index>(qcols.size()));
  for (Index j = 0; j < w.cols(); ++j) w.col(j) = ep.eigenvectors().col(qcols[j]);

  Mat<S> mw = w.transpose() * d * w;
  mw = S(0.5) * (mw + mw.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat<S>> em(mw);
  const auto& ev = em.eigenvalues();
  const S amax = ev.cwiseAbs().maxCoeff();
  const S amin = ev.cwiseAbs().minCoeff();
  // singularity is judged against the scale of D itself, not of the
  // projected block, so an (almost) annihilated block is still detected
  const S dscale = std::max(d.cwiseAbs().maxCoeff(), amax);
  if (!(amax > S(0)) || amin <= S(rank_rel_cutoff) * dscale) {
    throw DegenerateLimit("limit_schur_complement: Q D Q singular on range(Q)");
  }
  if (cond_out) *cond_out = static_cast<double>(amax / amin);
  Mat<S> minv = em.eigenvectors() * ev.cwiseInverse().asDiagonal() * em.eigenvectors().transpose();
  Mat<S> bw = b * w;
  Mat<S> out = a - bw * minv * bw.transpose();
  return S(0.5) * (out + out.transpose()).eval();
}

}  // namespace detail

// Direct sum over mode labels. Under the global all-q-then-all-p ordering
// this interleaves the blocks rather than stacking them block-diagonally:
// block k with n_k modes occupies global modes [sum n_(<k), sum n_(<=k)).
// Reductions onto the modes of one block recover that block exactly.
inline SymMatrix direct_sum(const std::vector<SymMatrix>& blocks) {
  if (blocks.empty()) throw Error("direct_sum: no blocks");
  Index total = 0;
  for (const auto& b : blocks) total += b.n_modes();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * total, 2 * total);
  Index off = 0;
  for (const auto& b : blocks) {
    const Index n = b.n_modes();
    const auto& m = b.matrix();
    g.block(off, off, n, n) = m.topLeftCorner(n, n);                      // qq
    g.block(total + off, total + off, n, n) = m.bottomRightCorner(n, n);  // pp
    g.block(off, total + off, n, n) = m.topRightCorner(n, n);             // qp
    g.block(total + off, off, n, n) = m.bottomLeftCorner(n, n);           // pq
    off += n;
  }
  return SymMatrix(g);
}

// Schur complement onto the kept modes: A - B D^{-1} B^T with A the
// keep-block, D the discard-block and B the cross-block. Throws
// SingularBlock when cond(D) exceeds `cond_cap`; callers facing a
// genuinely divergent D must use limit_schur_complement instead.
inline SymMatrix schur_complement(const SymMatrix& m, const std::vector<Index>& keep,
                                  double cond_cap = 1e12) {
  const Index n = m.n_modes();
  if (keep.empty()) throw Error("schur_complement: keep set empty");
  std::vector<bool> kept(static_cast<size_t>(n), false);
  for (Index k : keep) {
    if (k < 0 || k >= n) throw IndexOutOfRange("schur_complement: mode index out of range");
    kept[static_cast<size_t>(k)] = true;
  }
  std::vector<Index> discard;
  for (Index k = 0; k < n; ++k)
    if (!kept[static_cast<size_t>(k)]) discard.push_back(k);
  if (discard.empty()) return SymMatrix(m.matrix());

  const auto ik = detail::phase_indices(keep, n);
  const auto id = detail::phase_indices(discard, n);
  Eigen::MatrixXd a = detail::submatrix(m.matrix(), ik, ik);
  Eigen::MatrixXd b = detail::submatrix(m.matrix(), ik, id);
  Eigen::MatrixXd d = detail::submatrix(m.matrix(), id, id);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  const auto& ev = es.eigenvalues();
  const double amax = ev.cwiseAbs().maxCoeff();
  const double amin = ev.cwiseAbs().minCoeff();
  if (!(amin > 0) || amax / amin > cond_cap) {
    throw SingularBlock("schur_complement: discard block condition number exceeds cap");
  }
  Eigen::MatrixXd dinv =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return SymMatrix(a - b * dinv * b.transpose());
}

// lim_{lambda->inf} A - B (D_finite + lambda P)^{-1} B^T, i.e. the Schur
// complement against a block with divergent directions range(P).
// DegenerateLimit signals that Q D_finite Q is singular on range(Q) at the
// relative eigenvalue cutoff (default: standard numerical-rank convention).
inline SymMatrix limit_schur_complement(const SymMatrix& a, const Eigen::MatrixXd& b,
                                        const SymMatrix& d_finite, const SymMatrix& projector,
                                        double rank_rel_cutoff = 1e-10) {
  const Index nd = d_finite.dim();
  if (projector.dim() != nd) throw Error("limit_schur_complement: P/D dimension mismatch");
  if (b.rows() != a.dim() || b.cols() != nd) {
    throw Error("limit_schur_complement: cross block has wrong shape");
  }
  const Eigen::MatrixXd& p = projector.matrix();
  if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error("limit_schur_complement: P is not an orthogonal projector");
  }
  using LD = long double;
  detail::Mat<LD> al = a.matrix().cast<LD>();
  detail::Mat<LD> bl = b.cast<LD>();
  detail::Mat<LD> dl = d_finite.matrix().cast<LD>();
  detail::Mat<LD> pl = p.cast<LD>();
  detail::Mat<LD> out = detail::limit_schur_core<LD>(al, bl, dl, pl, rank_rel_cutoff);
  return SymMatrix(out.cast<double>());
}

namespace detail {

// nu_i^2 are the eigenvalues (each doubled) of the symmetric matrix
// -G^{1/2} Omega G Omega G^{1/2}; this keeps the computation real and
// self-adjoint throughout.
inline Eigen::VectorXd symplectic_eigenvalues_sym(const Eigen::MatrixXd& g) {
  const Index n = g.rows() / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(g);
  if (eg.eigenvalues().minCoeff() <= 0) {
    throw NotPositiveDefinite("symplectic_eigenvalues: matrix not positive definite");
  }
  Eigen::MatrixXd sqrtg = eg.operatorSqrt();
  Eigen::MatrixXd om = SymplecticForm(n).matrix();
  Eigen::MatrixXd m = -sqrtg * om * g * om * sqrtg;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m);
  Eigen::VectorXd nu(n);
  for (Index i = 0; i < n; ++i) nu(i) = std::sqrt(std::max(em.eigenvalues()(2 * i), 0.0));
  return nu;
}

// Cross-check route: moduli of the (purely imaginary) eigenvalues of
// Omega G via a general real eigensolver. Kept as an
// implementation-independent oracle for the symmetric route.
inline Eigen::VectorXd symplectic_eigenvalues_general(const Eigen::MatrixXd& g) {
  const Index n = g.rows() / 2;
  Eigen::MatrixXd om = SymplecticForm(n).matrix();
  Eigen::EigenSolver<Eigen::MatrixXd> es(om * g);
  std::vector<double> mods(static_cast<size_t>(2 * n));
  for (Index i = 0; i < 2 * n; ++i) mods[static_cast<size_t>(i)] = std::abs(es.eigenvalues()(i));
  std::sort(mods.begin(), mods.end());
  Eigen::VectorXd nu(n);
  for (Index i = 0; i < n; ++i) nu(i) = mods[static_cast<size_t>(2 * i)];
  return nu;
}

}  // namespace detail

// Symplectic spectrum of a positive definite CM: the N values nu_i with
// {+-i nu_i} the eigenvalues of Omega G, ascending, each pair reported once.
inline std::vector<double> symplectic_eigenvalues(const SymMatrix& g) {
  const Index n = g.n_modes();
  Eigen::VectorXd nu = detail::symplectic_eigenvalues_sym(g.matrix());
  std::vector<double> out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<size_t>(i)] = nu(i);
  std::sort(out.begin(), out.end());
  return out;
}

// Uncertainty-principle test: all symplectic eigenvalues >= 1 - tol.
inline bool is_valid_cm(const SymMatrix& g, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(g.matrix(), Eigen::EigenvaluesOnly);
  if (eg.eigenvalues().minCoeff() <= 0) return false;
  const auto nu = symplectic_eigenvalues(g);
  return nu.front() >= 1.0 - tol;
}

}  // namespace gmps

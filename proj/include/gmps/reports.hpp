#pragma once

// CSV table builders behind the CLI subcommands. Grid scans parallelize
// across grid points; rows are emitted in index order regardless of
// execution order, so identical inputs give byte-identical tables.

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gmps/entanglement_analysis.hpp"
#include "gmps/gaussian_states.hpp"
#include "gmps/io.hpp"
#include "gmps/mps_builder.hpp"

namespace gmps {

namespace detail {

inline void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// One row per separation class 1..floor(N/2); the class representative is
// the (0, k) pair (all pairs of a class agree by translational invariance,
// which distribution() asserts).
inline std::string distribution_csv(const GaussianState& g) {
  const auto records = distribution(g);
  const Index n = g.n_modes();
  std::ostringstream os;
  os << "separation,eta,eof,entangled\n";
  for (Index k = 1; k <= n / 2; ++k) {
    for (const auto& rec : records) {
      if (rec.separation == k && rec.i == 0) {
        os << k << ',' << csv_num(rec.eta) << ',' << csv_num(rec.eof_bits) << ','
           << (rec.entangled ? "true" : "false") << "\n";
        break;
      }
    }
  }
  return os.str();
}

// Threshold scan over (k, x). k = 1 rows need no solver: s_1 = s_min(x).
// NoThreshold points produce a row with an empty s_k field; the flag
// reports whether any occurred.
inline std::string thresholds_csv(Index n_sites, const BondSpec& bond,
                                  const std::vector<int>& ks, const std::vector<double>& xs,
                                  bool* any_no_threshold = nullptr) {
  struct Cell {
    std::optional<double> s_k;
  };
  std::vector<Cell> cells(ks.size() * xs.size());
  detail::parallel_for(cells.size(), [&](size_t idx) {
    const int k = ks[idx / xs.size()];
    const double x = xs[idx % xs.size()];
    if (k == 1) {
      cells[idx].s_k = BuildingBlockParams::s_min(x);
      return;
    }
    try {
      cells[idx].s_k = threshold(k, x, n_sites, bond).s_k;
    } catch (const NoThreshold&) {
      cells[idx].s_k = std::nullopt;
    }
  });
  bool missing = false;
  std::ostringstream os;
  os << "k,x,s_k\n";
  for (size_t a = 0; a < ks.size(); ++a) {
    for (size_t b = 0; b < xs.size(); ++b) {
      const auto& cell = cells[a * xs.size() + b];
      os << ks[a] << ',' << csv_num(xs[b]) << ',';
      if (cell.s_k) {
        os << csv_num(*cell.s_k);
      } else {
        missing = true;
      }
      os << "\n";
    }
  }
  if (any_no_threshold) *any_no_threshold = missing;
  return os.str();
}

// E_F surfaces over (x, d = s - s_min) for every separation class.
inline std::string scan_eof_csv(Index n_sites, const std::vector<double>& xs,
                                const std::vector<double>& ds, const BondSpec& bond) {
  for (double d : ds)
    if (!(d >= 0)) throw Unphysical("scan-eof: d must be >= 0");
  const Index kmax = n_sites / 2;
  std::vector<std::vector<double>> eofs(xs.size() * ds.size());
  detail::parallel_for(eofs.size(), [&](size_t idx) {
    const double x = xs[idx / ds.size()];
    const double d = ds[idx % ds.size()];
    const double s = BuildingBlockParams::s_min(x) + d;
    const GaussianState mps = build_mps(RingSpec{n_sites, BuildingBlockParams{s, x}, bond});
    auto& row = eofs[idx];
    row.reserve(static_cast<size_t>(kmax));
    for (Index k = 1; k <= kmax; ++k) {
      const double eta = ppt_eta(reduce(mps, {0, k}));
      row.push_back(eta < 1.0 - decision_tol ? eof(eta) : 0.0);
    }
  });
  std::ostringstream os;
  os << "x,d,k,eof\n";
  for (size_t a = 0; a < xs.size(); ++a) {
    for (size_t b = 0; b < ds.size(); ++b) {
      const auto& row = eofs[a * ds.size() + b];
      for (Index k = 1; k <= kmax; ++k) {
        os << csv_num(xs[a]) << ',' << csv_num(ds[b]) << ',' << k << ','
           << csv_num(row[static_cast<size_t>(k - 1)]) << "\n";
      }
    }
  }
  return os.str();
}

// Potential matrix V = C^2 of the parent Hamiltonian as CSV rows, plus the
// ground-state round-trip verification (ground_state_cm(V) against the MPS
// CM within 1e-8). The verdict is appended as a final "verified" line and
// reported through the out-parameters.
inline std::string hamiltonian_csv(const GaussianState& mps, bool* verified = nullptr,
                                   double* max_dev = nullptr) {
  const SymMatrix v = potential_matrix(extract_circulant(mps));
  const GaussianState ground = ground_state_cm(v);
  const double dev = (ground.matrix() - mps.matrix()).cwiseAbs().maxCoeff();
  const bool ok = dev <= 1e-8;
  if (verified) *verified = ok;
  if (max_dev) *max_dev = dev;
  std::string out = matrix_csv(v.matrix());
  out += std::string("verified,") + (ok ? "true" : "false") + "\n";
  return out;
}

}  // namespace gmps

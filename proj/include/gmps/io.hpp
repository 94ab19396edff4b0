#pragma once

// Plain-text formats used at the tool boundary.
//
// Matrix text (CM import/export): first line "2N", then 2N rows of 2N
// space-separated decimals in all-q-then-all-p ordering, full round-trip
// precision.
//
// CSV: comma separated, '.' decimal point, header row, 12 significant
// digits. Output is byte-deterministic for identical inputs.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmps/errors.hpp"
#include "gmps/symplectic_core.hpp"

namespace gmps {

// %.*g formatting; locale-independent for the "C" numeric locale the tool
// runs under.
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::string(buf);
}

inline std::string csv_num(double v) { return format_sig(v, 12); }

inline void write_matrix_text(std::ostream& os, const SymMatrix& m) {
  const Index d = m.dim();
  os << d << "\n";
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (j) os << ' ';
      os << format_sig(m(i, j), 17);
    }
    os << "\n";
  }
}

inline SymMatrix read_matrix_text(std::istream& is) {
  Index d = 0;
  if (!(is >> d) || d <= 0) throw Error("matrix text: missing or invalid dimension");
  Eigen::MatrixXd m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (!(is >> m(i, j))) throw Error("matrix text: truncated input");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error("matrix text: input is not symmetric");
  }
  return SymMatrix(m);
}

// Matrix as CSV rows with a c1..cn header (alternative export format).
inline std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << 'c' << (j + 1);
  os << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << csv_num(m(i, j));
    os << "\n";
  }
  return os.str();
}

}  // namespace gmps

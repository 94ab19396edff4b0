// Command-line front end: builds building blocks and ring states, tabulates
// entanglement distributions, scans thresholds, and emits figure data as CSV.
//
// Exit codes: 0 success, 2 input validation failure, 3 numerical failure
// (no threshold below the cap, degenerate limit, failed round-trip check).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmps/gmps.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr gmps::Index kDefaultSiteCap = 64;

struct CommonOut {
  std::string output_path;  // empty: stdout
  bool meta = false;
};

void emit(const CommonOut& out, const std::string& meta_lines, const std::string& payload) {
  std::string text = out.meta ? meta_lines + payload : payload;
  if (out.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.output_path);
  if (!f) throw gmps::Error("cannot open output file: " + out.output_path);
  f << text;
}

std::string meta_header(const std::string& command, const std::vector<std::string>& params) {
  std::ostringstream os;
  os << "# gmps " << command << "\n";
  for (const auto& p : params) os << "# " << p << "\n";
  return os.str();
}

gmps::BondSpec parse_bond(const std::string& text) {
  if (text == "inf") return gmps::BondSpec::infinite();
  double r = 0.0;
  try {
    size_t used = 0;
    r = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw gmps::Unphysical("bond must be 'inf' or a nonnegative real, got '" + text + "'");
  }
  if (r > gmps::BondSpec::r_cap) {
    std::cerr << "note: r = " << r << " exceeds r_cap = " << gmps::BondSpec::r_cap
              << ", using the infinite-squeezing limit\n";
  }
  return gmps::BondSpec::finite(r);
}

// Grid tokens: a plain number, or lo:hi:count for a uniform grid.
std::vector<double> parse_grid(const std::vector<std::string>& tokens) {
  std::vector<double> grid;
  for (const auto& tok : tokens) {
    const auto c1 = tok.find(':');
    if (c1 == std::string::npos) {
      grid.push_back(std::stod(tok));
      continue;
    }
    const auto c2 = tok.find(':', c1 + 1);
    if (c2 == std::string::npos) throw gmps::Unphysical("grid range must be lo:hi:count");
    const double lo = std::stod(tok.substr(0, c1));
    const double hi = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
    const long count = std::stol(tok.substr(c2 + 1));
    if (count < 1) throw gmps::Unphysical("grid range count must be >= 1");
    if (count == 1) {
      grid.push_back(lo);
      continue;
    }
    for (long i = 0; i < count; ++i) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  }
  if (grid.empty()) throw gmps::Unphysical("empty grid");
  return grid;
}

void check_site_count(gmps::Index n, bool allow_large) {
  if (n < 3) throw gmps::Unphysical("n must be >= 3");
  if (n > kDefaultSiteCap && !allow_large) {
    throw gmps::Unphysical("n exceeds the default cap of 64; pass --allow-large to override");
  }
}

std::string state_payload(const gmps::GaussianState& g, const std::string& format) {
  if (format == "csv") return gmps::matrix_csv(g.matrix());
  std::ostringstream os;
  gmps::write_matrix_text(os, g.cm());
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian matrix-product states on harmonic rings"};
  app.require_subcommand(1);

  // block
  double x = 1.0, s = 1.0;
  std::string bond_text = "inf";
  std::string format = "matrix-text";
  gmps::Index n = 6;
  bool allow_large = false;
  CommonOut out;

  auto add_common = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("-o,--output", out.output_path, "write payload to file instead of stdout");
    cmd->add_flag("--meta", out.meta, "prepend deterministic '#' metadata lines");
    if (with_format) {
      cmd->add_option("--format", format, "payload format")
          ->check(CLI::IsMember({"matrix-text", "csv"}));
    }
  };

  CLI::App* cmd_block = app.add_subcommand("block", "print the three-mode building block CM");
  cmd_block->add_option("--x", x, "output-port mixedness, x >= 1")->required();
  cmd_block->add_option("--s", s, "input-port mixedness, s >= (x+1)/2")->required();
  add_common(cmd_block, true);

  CLI::App* cmd_build = app.add_subcommand("build", "build the N-mode ring MPS CM");
  cmd_build->add_option("--n", n, "number of ring sites")->required();
  cmd_build->add_option("--x", x)->required();
  cmd_build->add_option("--s", s)->required();
  cmd_build->add_option("--bond", bond_text, "'inf' or finite squeezing r");
  cmd_build->add_flag("--allow-large", allow_large, "lift the default n <= 64 cap");
  add_common(cmd_build, true);

  std::string input_path;
  CLI::App* cmd_dist =
      app.add_subcommand("distribution", "pairwise entanglement by separation class");
  cmd_dist->add_option("--n", n, "number of ring sites");
  cmd_dist->add_option("--x", x);
  cmd_dist->add_option("--s", s);
  cmd_dist->add_option("--bond", bond_text);
  cmd_dist->add_option("--input", input_path, "analyze a CM from a matrix-text file instead");
  cmd_dist->add_flag("--allow-large", allow_large);
  add_common(cmd_dist, false);

  std::vector<std::string> k_tokens{"1", "2", "3"};
  std::vector<std::string> x_tokens, d_tokens;
  CLI::App* cmd_thr = app.add_subcommand("thresholds", "critical s_k over an x grid");
  cmd_thr->add_option("--n", n)->required();
  cmd_thr->add_option("--bond", bond_text);
  cmd_thr->add_option("--k-list", k_tokens, "separations, e.g. 1,2,3")->delimiter(',');
  cmd_thr->add_option("--x-grid", x_tokens, "x values or lo:hi:count ranges")
      ->delimiter(',')
      ->required();
  cmd_thr->add_flag("--allow-large", allow_large);
  add_common(cmd_thr, false);

  CLI::App* cmd_scan = app.add_subcommand("scan-eof", "E_F over an (x, d) grid, d = s - s_min");
  cmd_scan->add_option("--n", n)->required();
  cmd_scan->add_option("--x-grid", x_tokens)->delimiter(',')->required();
  cmd_scan->add_option("--d-grid", d_tokens)->delimiter(',')->required();
  cmd_scan->add_option("--bond", bond_text);
  cmd_scan->add_flag("--allow-large", allow_large);
  add_common(cmd_scan, false);

  CLI::App* cmd_ham =
      app.add_subcommand("hamiltonian", "potential matrix V = C^2 with round-trip check");
  cmd_ham->add_option("--n", n)->required();
  cmd_ham->add_option("--x", x)->required();
  cmd_ham->add_option("--s", s)->required();
  cmd_ham->add_option("--bond", bond_text);
  cmd_ham->add_flag("--allow-large", allow_large);
  add_common(cmd_ham, false);

  CLI::App* cmd_lr = app.add_subcommand("longrange", "analytic s -> inf limit CM and mu_loc");
  cmd_lr->add_option("--n", n)->required();
  cmd_lr->add_option("--x", x)->required();
  cmd_lr->add_flag("--allow-large", allow_large);
  add_common(cmd_lr, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_block->parsed()) {
      const gmps::GaussianState g = gmps::building_block({s, x});
      emit(out, meta_header("block", {"x = " + gmps::csv_num(x), "s = " + gmps::csv_num(s)}),
           state_payload(g, format));
      std::fprintf(stderr, "det = %.6f\n", g.matrix().determinant());
      return kExitOk;
    }

    if (cmd_build->parsed()) {
      check_site_count(n, allow_large);
      const gmps::BondSpec bond = parse_bond(bond_text);
      const gmps::GaussianState g = gmps::build_mps({n, {s, x}, bond});
      emit(out,
           meta_header("build", {"n = " + std::to_string(n), "x = " + gmps::csv_num(x),
                                 "s = " + gmps::csv_num(s), "bond = " + bond_text}),
           state_payload(g, format));
      return kExitOk;
    }

    if (cmd_dist->parsed()) {
      std::string payload;
      std::vector<std::string> meta;
      if (!input_path.empty()) {
        std::ifstream f(input_path);
        if (!f) throw gmps::Error("cannot open input file: " + input_path);
        const gmps::GaussianState g(gmps::read_matrix_text(f));
        payload = gmps::distribution_csv(g);
        meta = {"input = " + input_path};
      } else {
        check_site_count(n, allow_large);
        const gmps::BondSpec bond = parse_bond(bond_text);
        const gmps::GaussianState g = gmps::build_mps({n, {s, x}, bond});
        payload = gmps::distribution_csv(g);
        meta = {"n = " + std::to_string(n), "x = " + gmps::csv_num(x),
                "s = " + gmps::csv_num(s), "bond = " + bond_text};
      }
      emit(out, meta_header("distribution", meta), payload);
      return kExitOk;
    }

    if (cmd_thr->parsed()) {
      check_site_count(n, allow_large);
      const gmps::BondSpec bond = parse_bond(bond_text);
      std::vector<int> ks;
      for (const auto& t : k_tokens) ks.push_back(std::stoi(t));
      const std::vector<double> xs = parse_grid(x_tokens);
      bool missing = false;
      const std::string payload = gmps::thresholds_csv(n, bond, ks, xs, &missing);
      emit(out,
           meta_header("thresholds", {"n = " + std::to_string(n), "bond = " + bond_text}),
           payload);
      if (missing) {
        std::cerr << "note: some grid points have no threshold below s = 1e6\n";
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (cmd_scan->parsed()) {
      check_site_count(n, allow_large);
      const gmps::BondSpec bond = parse_bond(bond_text);
      const std::vector<double> xs = parse_grid(x_tokens);
      const std::vector<double> ds = parse_grid(d_tokens);
      const std::string payload = gmps::scan_eof_csv(n, xs, ds, bond);
      emit(out, meta_header("scan-eof", {"n = " + std::to_string(n), "bond = " + bond_text}),
           payload);
      return kExitOk;
    }

    if (cmd_ham->parsed()) {
      check_site_count(n, allow_large);
      const gmps::BondSpec bond = parse_bond(bond_text);
      const gmps::GaussianState mps = gmps::build_mps({n, {s, x}, bond});
      bool verified = false;
      double dev = 0.0;
      const std::string payload = gmps::hamiltonian_csv(mps, &verified, &dev);
      emit(out,
           meta_header("hamiltonian", {"n = " + std::to_string(n), "x = " + gmps::csv_num(x),
                                       "s = " + gmps::csv_num(s), "bond = " + bond_text}),
           payload);
      std::fprintf(stderr, "ground-state round-trip: %s (max deviation %.3e)\n",
                   verified ? "pass" : "FAIL", dev);
      return verified ? kExitOk : kExitNumerical;
    }

    if (cmd_lr->parsed()) {
      check_site_count(n, allow_large);
      const gmps::GaussianState g = gmps::long_range_cm(n, x);
      emit(out, meta_header("longrange", {"n = " + std::to_string(n), "x = " + gmps::csv_num(x)}),
           state_payload(g, format));
      std::fprintf(stderr, "mu_loc = %s\n", gmps::csv_num(gmps::local_purity(g, 0)).c_str());
      return kExitOk;
    }
  } catch (const gmps::Unphysical& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gmps::IndexOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gmps::NoThreshold& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const gmps::DegenerateLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const gmps::NotCirculantForm& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const gmps::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

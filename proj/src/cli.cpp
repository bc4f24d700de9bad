#include "twodist/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "twodist/constructions.hpp"
#include "twodist/format.hpp"
#include "twodist/parallel.hpp"
#include "twodist/pipeline.hpp"
#include "twodist/sdp_bounds.hpp"
#include "twodist/sdpa.hpp"
#include "twodist/sos_certifier.hpp"

namespace twodist {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes through `write` to path, or to out when path is empty.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open " + path + " for writing");
  write(f);
  if (!f) throw Failure("write to " + path + " failed");
}

void write_svg(std::ostream& os, const std::vector<SweepPoint>& pts, int n, int k) {
  const double W = 640, H = 400, L = 60, R = 20, T = 20, B = 40;
  double xmin = pts.front().a, xmax = pts.back().a, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& p : pts) {
    if (!std::isfinite(p.value)) continue;
    ymin = std::min(ymin, p.value);
    ymax = std::max(ymax, p.value);
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  auto X = [&](double a) { return L + (a - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 10 << "\" font-size=\"12\">a = " << fmt17(xmin) << "</text>\n";
  os << "<text x=\"" << W - R - 120 << "\" y=\"" << H - 10 << "\" font-size=\"12\">a = " << fmt17(xmax) << "</text>\n";
  os << "<text x=\"4\" y=\"" << T + 10 << "\" font-size=\"12\">" << std::llround(ymax) << "</text>\n";
  os << "<text x=\"4\" y=\"" << H - B << "\" font-size=\"12\">" << std::llround(ymin) << "</text>\n";
  os << "<text x=\"" << W / 2 - 60 << "\" y=\"" << T << "\" font-size=\"12\">SDP(a), n=" << n << ", k=" << k << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  bool first = true;
  for (const auto& p : pts) {
    if (!std::isfinite(p.value)) continue;
    os << (first ? "" : " ") << X(p.a) << ',' << Y(p.value);
    first = false;
  }
  os << "\"/>\n</svg>\n";
}

void print_table_text(std::ostream& out, const std::vector<BoundReport>& rows) {
  out << "   n      LP     SDP  n(n+1)/2   k\n";
  for (const auto& r : rows) {
    std::ostringstream lp, sdp;
    if (r.n <= 40 && std::isfinite(r.lp_bound)) lp << static_cast<long long>(std::floor(r.lp_bound + 1e-6));
    if (auto c = r.sdp_column()) {
      sdp << *c;
    } else if (r.rigor == "known" && r.final_upper) {
      sdp << *r.final_upper;
    } else {
      sdp << "-";
    }
    std::string n = std::to_string(r.n) + (r.starred ? "*" : "");
    out << std::setw(5) << n << std::setw(8) << lp.str() << std::setw(8) << sdp.str() << std::setw(10) << r.lower_bound
        << std::setw(4) << (r.winning_k ? std::to_string(r.winning_k) : "-") << '\n';
  }
}

struct Common {
  int p = 5;
  int jobs = default_jobs();
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--p", c.p, "truncation order of the Gegenbauer and zonal families")->check(CLI::Range(1, 12));
  cmd->add_option("--jobs", c.jobs, "worker threads (default: TWODIST_JOBS or 1)")->check(CLI::PositiveNumber);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on spherical two-distance sets"};
  app.require_subcommand(1);
  Common common;

  // bound
  int bound_n = 0;
  std::string bound_mode = "certified";
  bool bound_json = false, bound_csv = false;
  PipelineConfig bound_cfg;
  auto* bound = app.add_subcommand("bound", "upper bound for one dimension");
  bound->add_option("n", bound_n, "dimension")->required()->check(CLI::Range(2, 1000));
  bound->add_option("--mode", bound_mode, "certified or sweep")->check(CLI::IsMember({"certified", "sweep"}));
  bound->add_option("--grid", bound_cfg.sweep_grid, "primal grid points per I_k")->check(CLI::Range(2, 100000));
  bound->add_option("--segments", bound_cfg.segments, "initial segments per I_k")->check(CLI::Range(1, 10000));
  bound->add_option("--refine-budget", bound_cfg.refine_budget, "extra segment certifications")->check(CLI::NonNegativeNumber);
  auto* bj = bound->add_flag("--json", bound_json, "JSON report");
  bound->add_flag("--csv", bound_csv, "one CSV table row")->excludes(bj);
  add_common(bound, common);

  // table
  int table_from = 7, table_to = 40;
  std::string table_mode = "certified", table_out;
  bool table_json = false, table_csv = false;
  PipelineConfig table_cfg;
  auto* table = app.add_subcommand("table", "bounds for a range of dimensions");
  table->add_option("--from", table_from, "first dimension")->required()->check(CLI::Range(2, 1000));
  table->add_option("--to", table_to, "last dimension")->required()->check(CLI::Range(2, 1000));
  table->add_option("--mode", table_mode, "certified or sweep")->check(CLI::IsMember({"certified", "sweep"}));
  table->add_option("--grid", table_cfg.sweep_grid, "primal grid points per I_k")->check(CLI::Range(2, 100000));
  table->add_option("--segments", table_cfg.segments, "initial segments per I_k")->check(CLI::Range(1, 10000));
  table->add_option("--out", table_out, "output file (default stdout)");
  auto* tj = table->add_flag("--json", table_json, "JSON rows");
  table->add_flag("--csv", table_csv, "CSV rows")->excludes(tj);
  add_common(table, common);

  // sweep
  int sweep_n = 0, sweep_k = 0, sweep_grid = 101;
  std::string sweep_out, sweep_svg;
  auto* sweep_cmd = app.add_subcommand("sweep", "primal SDP(a) over I_k");
  sweep_cmd->add_option("n", sweep_n, "dimension")->required()->check(CLI::Range(3, 1000));
  sweep_cmd->add_option("--k", sweep_k, "LRS index")->required()->check(CLI::Range(2, 1000));
  sweep_cmd->add_option("--grid", sweep_grid, "grid points")->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--out", sweep_out, "CSV file (default stdout)");
  sweep_cmd->add_option("--svg", sweep_svg, "also draw the curve as SVG");
  add_common(sweep_cmd, common);

  // certify
  int cert_n = 0, cert_k = 0, cert_segments = 20;
  std::string cert_out;
  auto* certify = app.add_subcommand("certify", "SOS dual certificates on I_k");
  certify->add_option("n", cert_n, "dimension")->required()->check(CLI::Range(3, 1000));
  certify->add_option("--k", cert_k, "LRS index")->required()->check(CLI::Range(2, 1000));
  certify->add_option("--segments", cert_segments, "uniform segments")->check(CLI::Range(1, 10000));
  certify->add_option("--out", cert_out, "JSON file (default stdout)");
  add_common(certify, common);

  // lp
  int lp_n = 0, lp_grid = 1001;
  auto* lp = app.add_subcommand("lp", "LP bound maximized over every I_k");
  lp->add_option("n", lp_n, "dimension")->required()->check(CLI::Range(3, 1000));
  lp->add_option("--grid", lp_grid, "grid points per I_k")->check(CLI::Range(2, 1000000));
  add_common(lp, common);

  // construct simplex
  int cons_n = 0;
  std::string cons_out;
  auto* construct = app.add_subcommand("construct", "explicit two-distance sets");
  construct->require_subcommand(1);
  auto* simplex = construct->add_subcommand("simplex", "midpoints of the edges of a regular simplex");
  simplex->add_option("n", cons_n, "dimension")->required()->check(CLI::Range(2, 1000));
  simplex->add_option("--out", cons_out, "point file (default stdout)");

  // verify
  std::string verify_file;
  double verify_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "check a point file for the two-distance property");
  verify->add_option("file", verify_file, "point file")->required();
  verify->add_option("--tol", verify_tol, "inner-product clustering tolerance")->check(CLI::PositiveNumber);

  // export-sdpa
  int ex_n = 0, ex_k = 0;
  double ex_a = 0.0;
  std::string ex_out;
  bool ex_lp = false;
  auto* exp = app.add_subcommand("export-sdpa", "write the primal SDP at one a in SDPA sparse format");
  exp->add_option("n", ex_n, "dimension")->required()->check(CLI::Range(3, 1000));
  exp->add_option("--k", ex_k, "LRS index")->required()->check(CLI::Range(2, 1000));
  exp->add_option("--a", ex_a, "inner product a")->required();
  exp->add_option("--out", ex_out, "output file (default stdout)");
  exp->add_flag("--lp", ex_lp, "export the LP instead");
  add_common(exp, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bound) {
      bound_cfg.p = common.p;
      bound_cfg.jobs = common.jobs;
      bound_cfg.mode = parse_bound_mode(bound_mode);
      const BoundReport r = upper_bound(bound_n, bound_cfg);
      if (bound_json) {
        write_report_json(out, r);
      } else if (bound_csv) {
        write_table_csv(out, {r});
      } else {
        write_report_text(out, r);
      }
      if (!r.error.empty()) err << "n=" << r.n << ": " << r.error << '\n';
      return r.final_upper && r.rigor != "uncertified" ? 0 : 2;
    }
    if (*table) {
      if (table_to < table_from) throw UsageError("--to must be >= --from");
      table_cfg.p = common.p;
      table_cfg.jobs = common.jobs;
      table_cfg.mode = parse_bound_mode(table_mode);
      const auto rows = table_generate(table_from, table_to, table_cfg);
      emit(table_out, out, [&](std::ostream& os) {
        if (table_json) {
          write_table_json(os, rows);
        } else if (table_csv) {
          write_table_csv(os, rows);
        } else {
          print_table_text(os, rows);
        }
      });
      bool failed = false;
      for (const auto& r : rows) {
        if (!r.error.empty()) err << "n=" << r.n << ": " << r.error << '\n';
        failed = failed || r.rigor == "uncertified" || !r.final_upper;
      }
      return failed ? 2 : 0;
    }
    if (*sweep_cmd) {
      const auto pts = sweep(sweep_n, sweep_k, common.p, sweep_grid, {}, common.jobs);
      emit(sweep_out, out, [&](std::ostream& os) { write_sweep_csv(os, pts); });
      if (!sweep_svg.empty()) emit(sweep_svg, out, [&](std::ostream& os) { write_svg(os, pts, sweep_n, sweep_k); });
      int failed = 0;
      for (const auto& pt : pts) {
        if (pt.status == SolveStatus::optimal || pt.status == SolveStatus::unbounded) continue;
        ++failed;
        err << "a=" << fmt17(pt.a) << ": " << to_string(pt.status) << '\n';
      }
      return failed ? 2 : 0;
    }
    if (*certify) {
      if (cert_k > k_range(cert_n).back() && cert_n >= 7) err << "note: k=" << cert_k << " is outside k_range(" << cert_n << ")\n";
      const auto cert = certify_interval(cert_n, cert_k, common.p, cert_segments, {}, common.jobs);
      emit(cert_out, out, [&](std::ostream& os) { write_certificate_json(os, cert); });
      if (!cert_out.empty()) out << "max segment bound " << fmt17(cert.bound) << (cert.all_ok ? " (all segments certified)" : " (some segments failed)") << '\n';
      for (const auto& s : cert.per_segment) {
        if (!s.ok()) err << "segment [" << fmt17(s.a1.get_d()) << ", " << fmt17(s.a2.get_d()) << "]: " << to_string(s.status) << ": " << s.message << '\n';
      }
      return cert.all_ok ? 0 : 2;
    }
    if (*lp) {
      const double v = lp_protocol(lp_n, common.p, lp_grid);
      out << "lp_bound " << fmt17(v) << '\n';
      if (std::isfinite(v)) out << "lp_floor " << static_cast<long long>(std::floor(v + 1e-6)) << '\n';
      return 0;
    }
    if (*construct) {
      const PointSet ps = simplex_midpoint_set(cons_n);
      emit(cons_out, out, [&](std::ostream& os) { write_point_set(os, ps); });
      return 0;
    }
    if (*verify) {
      std::ifstream f(verify_file);
      if (!f) throw UsageError("cannot open " + verify_file);
      PointSet ps;
      try {
        ps = read_point_set(f);
      } catch (const std::invalid_argument& e) {
        throw Failure(verify_file + ": " + e.what());
      }
      if (ps.size() < 2) throw Failure(verify_file + ": fewer than two points");
      const auto check = verify_two_distance(ps, verify_tol);
      if (!check.ok) {
        err << "not a two-distance set: " << check.message << '\n';
        return 2;
      }
      const auto k = ps.n >= 2 ? lrs_k(check.a, check.b, ps.n, 1e-6) : std::nullopt;
      char buf[160];
      std::snprintf(buf, sizeof buf, "two-distance: a=%.12g b=%.12g k=%s", check.a, check.b, k ? std::to_string(*k).c_str() : "none");
      out << buf << '\n';
      return 0;
    }
    if (*exp) {
      if (!(ex_a >= 0.0 && ex_a <= interval_end(ex_k) * (1.0 + 1e-12))) {
        throw UsageError("--a must lie in [0, 1/(2k-1)]");
      }
      auto inst = TwoDistanceInstance::on_lrs_line(ex_n, ex_k, ex_a, common.p);
      const ConicProblem prob = ex_lp ? build_lp_conic(inst) : build_primal_sdp(inst);
      const std::string text = export_sdpa(prob);
      emit(ex_out, out, [&](std::ostream& os) { os << text; });
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace twodist

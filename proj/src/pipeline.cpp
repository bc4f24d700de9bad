#include "twodist/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "twodist/format.hpp"
#include "twodist/parallel.hpp"
#include "twodist/sdp_bounds.hpp"

namespace twodist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Segment {
  int k;
  Rational a1, a2;
  double bound = kInf;
  bool ok = false;
  std::string message;
  bool frozen = false;  // a child failed; this certificate stays as is
};

long long floor_bound(double v) { return static_cast<long long>(std::floor(v + 1e-6)); }

// Smallest-denominator rational in [lo, hi], by continued fractions.
Rational simplest_between(Rational lo, Rational hi) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (lo == fl) return Rational(fl);
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  lo -= fl;
  hi -= fl;
  Rational r = simplest_between(1 / hi, 1 / lo);
  return Rational(fl) + 1 / r;
}

double primal_sample(int n, int k, double a, const PipelineConfig& cfg) {
  try {
    return sdp_value(n, k, a, cfg.p, cfg.solver);
  } catch (const SolverFailure&) {
    return kNaN;
  }
}

// Bisects the segments that keep the certified maximum from settling against the
// primal lower estimate, until the budget runs out.
void refine(int n, const PipelineConfig& cfg, const std::map<int, SegmentCertifier>& certifiers,
            std::vector<Segment>& segs, double& lower) {
  int budget = cfg.refine_budget;
  while (budget >= 2 && std::isfinite(lower)) {
    std::vector<std::size_t> blocking;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      const double width = Rational(s.a2 - s.a1).get_d();
      if (s.frozen || width < 1e-9 * interval_end(s.k)) continue;
      if (s.bound > lower + cfg.refine_tol && (!std::isfinite(s.bound) || floor_bound(s.bound) > floor_bound(lower))) {
        blocking.push_back(i);
      }
    }
    if (blocking.empty()) return;
    std::stable_sort(blocking.begin(), blocking.end(), [&](std::size_t x, std::size_t y) { return segs[x].bound > segs[y].bound; });
    blocking.resize(std::min<std::size_t>(blocking.size(), static_cast<std::size_t>(budget / 2)));
    budget -= 2 * static_cast<int>(blocking.size());

    std::vector<Segment> children;
    std::vector<std::pair<int, double>> probes;
    for (auto i : blocking) {
      const auto& s = segs[i];
      const Rational mid = (s.a1 + s.a2) / 2;
      children.push_back(Segment{s.k, s.a1, mid, kInf, false, {}, false});
      children.push_back(Segment{s.k, mid, s.a2, kInf, false, {}, false});
      // Extremal configurations tend to sit at small-denominator inner products.
      const Rational nice = simplest_between(s.a1, s.a2);
      probes.emplace_back(s.k, mid.get_d());
      if (nice != mid) probes.emplace_back(s.k, nice.get_d());
    }
    std::vector<double> samples(probes.size());
    parallel_for(children.size() + probes.size(), cfg.jobs, [&](std::size_t t) {
      if (t < children.size()) {
        auto& c = children[t];
        auto cert = certifiers.at(c.k).certify(c.a1, c.a2, cfg.certify);
        c.ok = cert.ok();
        c.bound = c.ok ? cert.bound : kInf;
        c.message = cert.message;
      } else {
        const auto& [k, a] = probes[t - children.size()];
        samples[t - children.size()] = primal_sample(n, k, a, cfg);
      }
    });
    for (double v : samples) {
      if (!std::isnan(v)) lower = std::max(lower, v);
    }
    std::vector<bool> drop(segs.size(), false);
    std::vector<Segment> next;
    for (std::size_t j = 0; j < blocking.size(); ++j) {
      auto& left = children[2 * j];
      auto& right = children[2 * j + 1];
      auto& parent = segs[blocking[j]];
      // A failed child leaves the union covered by the parent certificate.
      if (parent.ok && !(left.ok && right.ok)) {
        parent.frozen = true;
        continue;
      }
      drop[blocking[j]] = true;
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (!drop[i]) next.push_back(std::move(segs[i]));
    }
    std::stable_sort(next.begin(), next.end(), [](const Segment& x, const Segment& y) {
      return x.k != y.k ? x.k < y.k : x.a1 < y.a1;
    });
    segs = std::move(next);
  }
}

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json row_json(const BoundReport& r) {
  nlohmann::json lp = r.n <= 40 && std::isfinite(r.lp_bound) ? nlohmann::json(floor_bound(r.lp_bound)) : nlohmann::json(nullptr);
  return {{"n", r.n},
          {"lp", lp},
          {"sdp", optional_json(r.sdp_column())},
          {"certified", number_json(r.certified_bound)},
          {"lower", r.lower_bound},
          {"k", r.winning_k},
          {"rigor", r.rigor},
          {"starred", r.starred}};
}

}  // namespace

std::string to_string(BoundMode m) { return m == BoundMode::sweep ? "sweep" : "certified"; }

BoundMode parse_bound_mode(const std::string& s) {
  if (s == "sweep") return BoundMode::sweep;
  if (s == "certified") return BoundMode::certified;
  throw std::invalid_argument("unknown bound mode '" + s + "'");
}

double BoundReport::ik_bound() const { return mode == BoundMode::certified ? certified_bound : sdp_bound; }

std::optional<long long> BoundReport::sdp_column() const {
  const double v = ik_bound();
  if (!std::isfinite(v)) return std::nullopt;
  return floor_bound(v);
}

std::vector<int> k_range(int n) {
  const int hi = static_cast<int>(std::floor((1.0 + std::sqrt(2.0 * n)) / 2.0));
  std::vector<int> out;
  for (int k = 2; k <= hi; ++k) out.push_back(k);
  return out;
}

long long harmonic_bound(int n) {
  if (n < 2) throw std::invalid_argument("harmonic bound needs n >= 2");
  return static_cast<long long>(n) * (n + 3) / 2;
}

std::optional<long long> known_value(int n) {
  static const long long table[] = {5, 6, 10, 16, 27};
  if (n < 2 || n > 6) return std::nullopt;
  return table[n - 2];
}

double lp_protocol(int n, int p, int grid) {
  if (grid < 2) throw std::invalid_argument("LP grid needs at least 2 points");
  double best = -kInf;
  for (int k : k_range(n)) {
    const double end = interval_end(k);
    for (int j = 0; j < grid; ++j) {
      const double a = j == grid - 1 ? end : end * j / (grid - 1);
      best = std::max(best, lp_bound(TwoDistanceInstance::on_lrs_line(n, k, a, p)));
    }
  }
  return best;
}

BoundReport upper_bound(int n, const PipelineConfig& cfg) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  BoundReport r;
  r.n = n;
  r.p = cfg.p;
  r.mode = cfg.mode;
  r.lower_bound = static_cast<long long>(n) * (n + 1) / 2;
  r.harmonic = harmonic_bound(n);
  r.lp_bound = r.sdp_bound = r.certified_bound = kNaN;

  if (auto known = known_value(n)) {
    r.final_upper = *known;
    r.rigor = "known";
    r.case_breakdown["known"] = static_cast<double>(*known);
    return r;
  }

  auto fail = [&](const std::string& why) {
    r.error += (r.error.empty() ? "" : "; ") + why;
  };
  try {
    r.lp_bound = lp_protocol(n, cfg.p, cfg.lp_grid);
  } catch (const std::exception& e) {
    fail(std::string("LP: ") + e.what());
  }

  const auto ks = k_range(n);
  r.sdp_bound = -kInf;
  for (int k : ks) {
    KBound kb;
    kb.k = k;
    kb.certified = kNaN;
    const auto pts = sweep(n, k, cfg.p, cfg.sweep_grid, cfg.solver, cfg.jobs);
    kb.sweep_max = sweep_max(pts);
    int failed = 0;
    for (const auto& pt : pts) {
      if (pt.status != SolveStatus::optimal && pt.status != SolveStatus::unbounded) ++failed;
      if (pt.value == kb.sweep_max) kb.a_at_max = pt.a;
    }
    if (failed) fail("k=" + std::to_string(k) + ": " + std::to_string(failed) + " sweep points failed");
    if (std::isnan(kb.sweep_max)) {
      kb.sweep_max = kInf;  // nothing solved: no finite estimate
    }
    r.sdp_bound = std::max(r.sdp_bound, kb.sweep_max);
    r.per_k.push_back(kb);
  }

  if (cfg.mode == BoundMode::certified) {
    std::map<int, SegmentCertifier> certifiers;
    for (int k : ks) certifiers.emplace(k, SegmentCertifier(n, k, cfg.p));
    std::vector<Segment> segs;
    for (int k : ks) {
      const Rational step(1, cfg.segments * (2 * k - 1));
      for (int j = 0; j < cfg.segments; ++j) segs.push_back(Segment{k, step * j, step * (j + 1), kInf, false, {}, false});
    }
    parallel_for(segs.size(), cfg.jobs, [&](std::size_t i) {
      auto& s = segs[i];
      auto cert = certifiers.at(s.k).certify(s.a1, s.a2, cfg.certify);
      s.ok = cert.ok();
      s.bound = s.ok ? cert.bound : kInf;
      s.message = cert.message;
    });
    double lower = r.sdp_bound;
    refine(n, cfg, certifiers, segs, lower);

    r.certified_bound = -kInf;
    bool all_ok = true;
    for (auto& kb : r.per_k) {
      kb.certified = -kInf;
      kb.all_ok = true;
      for (const auto& s : segs) {
        if (s.k != kb.k) continue;
        ++kb.segments;
        kb.certified = std::max(kb.certified, s.bound);
        if (!s.ok) {
          kb.all_ok = false;
          fail("k=" + std::to_string(kb.k) + " segment [" + fmt17(s.a1.get_d()) + ", " + fmt17(s.a2.get_d()) + "]: " + s.message);
        }
      }
      all_ok = all_ok && kb.all_ok;
      r.certified_bound = std::max(r.certified_bound, kb.certified);
    }
    r.rigor = all_ok && std::isfinite(r.certified_bound) ? "certified" : "uncertified";
  } else {
    r.rigor = "sweep";
  }

  double best = -kInf;
  for (const auto& kb : r.per_k) {
    const double v = cfg.mode == BoundMode::certified ? kb.certified : kb.sweep_max;
    r.case_breakdown["I_" + std::to_string(kb.k)] = v;
    if (v > best + 1e-9 * std::max(1.0, std::abs(best)) || r.winning_k == 0) {
      best = v;
      r.winning_k = kb.k;
    }
  }
  r.case_breakdown["a+b>=0"] = static_cast<double>(r.lower_bound);
  r.case_breakdown["b<a<0"] = n + 1.0;

  const double ik = r.ik_bound();
  if (std::isfinite(ik)) {
    r.final_upper = floor_bound(std::max({static_cast<double>(r.lower_bound), ik, n + 1.0}));
  } else {
    fail("I_k bound is not finite");
  }
  const auto col = r.sdp_column();
  r.starred = col && *col > r.lower_bound && n != 22;
  return r;
}

std::vector<BoundReport> table_generate(int n_from, int n_to, const PipelineConfig& config) {
  if (n_from < 2 || n_to < n_from) throw std::invalid_argument("table range must satisfy 2 <= from <= to");
  std::vector<BoundReport> rows(static_cast<std::size_t>(n_to - n_from + 1));
  PipelineConfig row_cfg = config;
  if (rows.size() > 1) row_cfg.jobs = 1;  // parallelism goes across rows
  parallel_for(rows.size(), rows.size() > 1 ? config.jobs : 1, [&](std::size_t i) {
    const int n = n_from + static_cast<int>(i);
    try {
      rows[i] = upper_bound(n, row_cfg);
    } catch (const std::exception& e) {
      rows[i] = BoundReport{};
      rows[i].n = n;
      rows[i].p = config.p;
      rows[i].mode = config.mode;
      rows[i].lp_bound = rows[i].sdp_bound = rows[i].certified_bound = kNaN;
      rows[i].lower_bound = static_cast<long long>(n) * (n + 1) / 2;
      rows[i].harmonic = harmonic_bound(n);
      rows[i].rigor = "uncertified";
      rows[i].error = e.what();
    }
  });
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<BoundReport>& rows) {
  out << "n,lp,sdp,certified,lower,k,rigor,starred\n";
  for (const auto& r : rows) {
    out << r.n << ',';
    if (r.n <= 40 && std::isfinite(r.lp_bound)) out << floor_bound(r.lp_bound);
    out << ',';
    if (auto c = r.sdp_column()) out << *c;
    out << ',';
    if (!std::isnan(r.certified_bound)) out << fmt17(r.certified_bound);
    out << ',' << r.lower_bound << ',' << r.winning_k << ',' << r.rigor << ',' << (r.starred ? 1 : 0) << '\n';
  }
}

void write_table_json(std::ostream& out, const std::vector<BoundReport>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(row_json(r));
  out << j.dump(2) << '\n';
}

void write_report_text(std::ostream& out, const BoundReport& r) {
  auto opt = [](const std::optional<long long>& v) { return v ? std::to_string(*v) : std::string("none"); };
  out << "n " << r.n << '\n'
      << "p " << r.p << '\n'
      << "mode " << to_string(r.mode) << '\n'
      << "lp_bound " << fmt17(r.lp_bound) << '\n'
      << "sdp_bound " << fmt17(r.sdp_bound) << '\n'
      << "certified_bound " << fmt17(r.certified_bound) << '\n'
      << "sdp_column " << opt(r.sdp_column()) << '\n'
      << "final_upper " << opt(r.final_upper) << '\n'
      << "lower_bound " << r.lower_bound << '\n'
      << "harmonic " << r.harmonic << '\n'
      << "winning_k " << r.winning_k << '\n'
      << "rigor " << r.rigor << '\n'
      << "starred " << (r.starred ? 1 : 0) << '\n';
  for (const auto& [name, v] : r.case_breakdown) out << "case " << name << ' ' << fmt17(v) << '\n';
  for (const auto& kb : r.per_k) {
    out << "k " << kb.k << " sweep_max " << fmt17(kb.sweep_max) << " a_at_max " << fmt17(kb.a_at_max) << " certified "
        << fmt17(kb.certified) << " segments " << kb.segments << " ok " << (kb.all_ok ? 1 : 0) << '\n';
  }
  if (!r.error.empty()) out << "error " << r.error << '\n';
}

void write_report_json(std::ostream& out, const BoundReport& r) {
  nlohmann::json cases = nlohmann::json::object();
  for (const auto& [name, v] : r.case_breakdown) cases[name] = number_json(v);
  nlohmann::json ks = nlohmann::json::array();
  for (const auto& kb : r.per_k) {
    ks.push_back({{"k", kb.k},
                  {"sweep_max", number_json(kb.sweep_max)},
                  {"a_at_max", kb.a_at_max},
                  {"certified", number_json(kb.certified)},
                  {"segments", kb.segments},
                  {"all_ok", kb.all_ok}});
  }
  nlohmann::json j{{"n", r.n},
                   {"p", r.p},
                   {"mode", to_string(r.mode)},
                   {"lp_bound", number_json(r.lp_bound)},
                   {"sdp_bound", number_json(r.sdp_bound)},
                   {"certified_bound", number_json(r.certified_bound)},
                   {"sdp_column", optional_json(r.sdp_column())},
                   {"final_upper", optional_json(r.final_upper)},
                   {"lower_bound", r.lower_bound},
                   {"harmonic", r.harmonic},
                   {"winning_k", r.winning_k},
                   {"rigor", r.rigor},
                   {"starred", r.starred},
                   {"case_breakdown", cases},
                   {"per_k", ks},
                   {"error", r.error}};
  out << j.dump(2) << '\n';
}

}  // namespace twodist

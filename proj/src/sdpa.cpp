#include "twodist/sdpa.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "twodist/format.hpp"

namespace twodist {

namespace {

struct SdpaVar {
  std::size_t orig;
  int sign;
};

// Where a diagonal-block row came from: a 1x1 problem block or z_j >= 0.
struct DiagRow {
  bool is_block;
  std::size_t index;
};

}  // namespace

std::string export_sdpa(const ConicProblem& problem) {
  problem.validate();
  const auto& vars = problem.variables();
  const auto& blocks = problem.blocks();
  const auto& obj = problem.objective();

  std::vector<SdpaVar> zvars;
  std::vector<std::vector<std::size_t>> of_orig(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    of_orig[v].push_back(zvars.size());
    zvars.push_back({v, 1});
    if (vars[v].sign == VarSign::free) {
      of_orig[v].push_back(zvars.size());
      zvars.push_back({v, -1});
    }
  }

  std::vector<std::size_t> full;  // problem blocks exported as SDPA blocks
  std::vector<DiagRow> diag;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].size() == 1) {
      diag.push_back({true, b});
    } else {
      full.push_back(b);
    }
  }
  for (std::size_t j = 0; j < zvars.size(); ++j) diag.push_back({false, j});

  std::ostringstream os;
  os << "* twodist sdpa export\n";
  os << "* sense " << (obj.sense == Sense::maximize ? "maximize" : "minimize") << '\n';
  os << "* offset " << fmt17(obj.offset) << '\n';
  for (std::size_t j = 0; j < zvars.size(); ++j) {
    os << "* var " << j + 1 << ' ' << zvars[j].orig << ' ' << (zvars[j].sign > 0 ? '+' : '-') << '\n';
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (of_orig[v].size() == 2) os << "* free " << v << ' ' << of_orig[v][0] + 1 << ' ' << of_orig[v][1] + 1 << '\n';
  }
  for (std::size_t i = 0; i < full.size(); ++i) os << "* block " << i + 1 << ' ' << full[i] << '\n';
  for (std::size_t r = 0; r < diag.size(); ++r) {
    os << "* diag " << r + 1 << (diag[r].is_block ? " block " : " var ") << (diag[r].is_block ? diag[r].index : diag[r].index + 1)
       << '\n';
  }

  const std::size_t nblocks = full.size() + (diag.empty() ? 0 : 1);
  os << zvars.size() << '\n' << nblocks << '\n';
  for (std::size_t i = 0; i < full.size(); ++i) os << (i ? " " : "") << blocks[full[i]].size();
  if (!diag.empty()) os << (full.empty() ? "" : " ") << -static_cast<long>(diag.size());
  os << '\n';
  const double osign = obj.sense == Sense::maximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < zvars.size(); ++j) {
    const double c = obj.coeffs.empty() ? 0.0 : obj.coeffs[zvars[j].orig];
    os << (j ? " " : "") << fmt17(osign * zvars[j].sign * c);
  }
  os << '\n';

  auto emit = [&](std::size_t matno, std::size_t blk, Eigen::Index i, Eigen::Index j, double val) {
    if (val != 0.0) os << matno << ' ' << blk << ' ' << i + 1 << ' ' << j + 1 << ' ' << fmt17(val) << '\n';
  };
  auto emit_matrix = [&](std::size_t matno, std::size_t blk, const Eigen::MatrixXd& m, double s) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) emit(matno, blk, i, j, s * m(i, j));
    }
  };
  const std::size_t diag_blk = full.size() + 1;
  for (std::size_t i = 0; i < full.size(); ++i) emit_matrix(0, i + 1, blocks[full[i]].constant, -1.0);
  for (std::size_t r = 0; r < diag.size(); ++r) {
    if (diag[r].is_block) emit(0, diag_blk, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r), -blocks[diag[r].index].constant(0, 0));
  }
  for (std::size_t j = 0; j < zvars.size(); ++j) {
    const double s = zvars[j].sign;
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (const auto* a = blocks[full[i]].coeff_of(zvars[j].orig)) emit_matrix(j + 1, i + 1, *a, s);
    }
    for (std::size_t r = 0; r < diag.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      if (diag[r].is_block) {
        if (const auto* a = blocks[diag[r].index].coeff_of(zvars[j].orig)) emit(j + 1, diag_blk, ri, ri, s * (*a)(0, 0));
      } else if (diag[r].index == j) {
        emit(j + 1, diag_blk, ri, ri, 1.0);
      }
    }
  }
  return os.str();
}

ConicProblem import_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::ostringstream body;
  bool has_header = false;
  Sense sense = Sense::minimize;
  double offset = 0.0;
  std::map<std::size_t, SdpaVar> var_map;
  std::map<std::size_t, std::size_t> free_of;
  std::map<std::size_t, std::size_t> block_map;
  std::map<std::size_t, DiagRow> diag_map;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "sense") {
        std::string s;
        hs >> s;
        sense = s == "maximize" ? Sense::maximize : Sense::minimize;
        has_header = true;
      } else if (key == "offset") {
        std::string s;
        hs >> s;
        offset = std::stod(s);
      } else if (key == "var") {
        std::size_t j, v;
        char sign;
        if (!(hs >> j >> v >> sign)) throw std::invalid_argument("bad var header: " + line);
        var_map[j] = {v, sign == '-' ? -1 : 1};
      } else if (key == "free") {
        std::size_t v, jp, jm;
        if (!(hs >> v >> jp >> jm)) throw std::invalid_argument("bad free header: " + line);
        free_of[v] = jp;
      } else if (key == "block") {
        std::size_t s, o;
        if (!(hs >> s >> o)) throw std::invalid_argument("bad block header: " + line);
        block_map[s] = o;
      } else if (key == "diag") {
        std::size_t r, idx;
        std::string kind;
        if (!(hs >> r >> kind >> idx)) throw std::invalid_argument("bad diag header: " + line);
        diag_map[r] = {kind == "block", kind == "block" ? idx : idx - 1};
      }
      continue;
    }
    // Header lines may carry a trailing "= name" annotation.
    if (auto eq = line.find('='); eq != std::string::npos) line.erase(eq);
    for (char& c : line) {
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    }
    body << line << '\n';
  }

  std::istringstream ts(body.str());
  auto next_int = [&](const char* what) {
    long v;
    if (!(ts >> v)) throw std::invalid_argument(std::string("SDPA: expected ") + what);
    return v;
  };
  auto next_double = [&](const char* what) {
    std::string tok;
    if (!(ts >> tok)) throw std::invalid_argument(std::string("SDPA: expected ") + what);
    try {
      return std::stod(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("SDPA: bad number '" + tok + "'");
    }
  };
  const long m = next_int("number of variables");
  const long nb = next_int("number of blocks");
  if (m < 0 || nb < 0) throw std::invalid_argument("SDPA: negative counts");
  std::vector<long> sizes(static_cast<std::size_t>(nb));
  for (auto& s : sizes) {
    s = next_int("block size");
    if (s == 0) throw std::invalid_argument("SDPA: zero block size");
  }
  std::vector<double> c(static_cast<std::size_t>(m));
  for (auto& v : c) v = next_double("objective coefficient");

  // (matno, block, i, j) -> value; matno 0 is F_0.
  struct Entry {
    long mat, blk, i, j;
    double val;
  };
  std::vector<Entry> entries;
  long mat;
  while (ts >> mat) {
    Entry e{mat, next_int("block index"), next_int("row"), next_int("column"), next_double("entry value")};
    if (e.mat < 0 || e.mat > m || e.blk < 1 || e.blk > nb) throw std::invalid_argument("SDPA: entry index out of range");
    const long size = std::labs(sizes[static_cast<std::size_t>(e.blk - 1)]);
    if (e.i < 1 || e.j < 1 || e.i > size || e.j > size) throw std::invalid_argument("SDPA: entry outside its block");
    if (sizes[static_cast<std::size_t>(e.blk - 1)] < 0 && e.i != e.j) throw std::invalid_argument("SDPA: off-diagonal entry in diagonal block");
    entries.push_back(e);
  }
  if (!ts.eof()) throw std::invalid_argument("SDPA: trailing garbage in entry list");

  // Target structure: variables (orig index, sign) and blocks.
  std::size_t nvars = static_cast<std::size_t>(m);
  std::vector<SdpaVar> zvars(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < zvars.size(); ++j) zvars[j] = {j, 1};
  if (has_header) {
    nvars = 0;
    for (std::size_t j = 0; j < zvars.size(); ++j) {
      auto it = var_map.find(j + 1);
      if (it == var_map.end()) throw std::invalid_argument("SDPA: header misses variable " + std::to_string(j + 1));
      zvars[j] = it->second;
      nvars = std::max(nvars, it->second.orig + 1);
    }
  }
  std::vector<Eigen::Index> orig_sizes;
  std::map<std::pair<long, long>, std::size_t> diag_target;  // (blk, row) -> orig block, absent = sign row
  std::map<long, std::size_t> full_target;
  if (has_header) {
    std::size_t count = 0;
    for (const auto& [s, o] : block_map) count = std::max(count, o + 1);
    for (const auto& [r, d] : diag_map) {
      if (d.is_block) count = std::max(count, d.index + 1);
    }
    orig_sizes.assign(count, 0);
    long diag_blk = 0;
    for (long b = 1; b <= nb; ++b) {
      if (sizes[static_cast<std::size_t>(b - 1)] < 0) {
        diag_blk = b;
      } else {
        auto it = block_map.find(static_cast<std::size_t>(b));
        if (it == block_map.end()) throw std::invalid_argument("SDPA: header misses block " + std::to_string(b));
        full_target[b] = it->second;
        orig_sizes[it->second] = sizes[static_cast<std::size_t>(b - 1)];
      }
    }
    for (const auto& [r, d] : diag_map) {
      if (d.is_block) {
        diag_target[{diag_blk, static_cast<long>(r)}] = d.index;
        orig_sizes[d.index] = 1;
      }
    }
  } else {
    for (long b = 1; b <= nb; ++b) {
      const long s = sizes[static_cast<std::size_t>(b - 1)];
      if (s > 0) {
        full_target[b] = orig_sizes.size();
        orig_sizes.push_back(s);
      } else {
        for (long r = 1; r <= -s; ++r) {
          diag_target[{b, r}] = orig_sizes.size();
          orig_sizes.push_back(1);
        }
      }
    }
  }
  for (auto s : orig_sizes) {
    if (s == 0) throw std::invalid_argument("SDPA: header leaves a block undefined");
  }

  std::vector<Eigen::MatrixXd> constants;
  for (auto s : orig_sizes) constants.push_back(Eigen::MatrixXd::Zero(s, s));
  std::vector<std::map<std::size_t, Eigen::MatrixXd>> coeffs(orig_sizes.size());
  for (const auto& e : entries) {
    std::size_t ob;
    Eigen::Index i = 0, j = 0;
    if (sizes[static_cast<std::size_t>(e.blk - 1)] > 0) {
      ob = full_target.at(e.blk);
      i = e.i - 1;
      j = e.j - 1;
    } else {
      auto it = diag_target.find({e.blk, e.i});
      if (it == diag_target.end()) continue;  // z_j >= 0 row, implied by the variable sign
      ob = it->second;
    }
    Eigen::MatrixXd* target;
    double s = 1.0;
    if (e.mat == 0) {
      target = &constants[ob];
      s = -1.0;
    } else {
      const auto& zv = zvars[static_cast<std::size_t>(e.mat - 1)];
      // The minus half of a split variable repeats the plus half negated.
      if (has_header && zv.sign < 0) continue;
      auto& slot = coeffs[ob][zv.orig];
      if (slot.size() == 0) slot = Eigen::MatrixXd::Zero(orig_sizes[ob], orig_sizes[ob]);
      target = &slot;
    }
    (*target)(i, j) += s * e.val;
    if (i != j) (*target)(j, i) += s * e.val;
  }

  ConicProblem prob;
  for (std::size_t v = 0; v < nvars; ++v) {
    VarSign sign = VarSign::free;
    if (has_header && !free_of.count(v)) sign = VarSign::nonneg;
    prob.add_variable("z" + std::to_string(v + 1), sign);
  }
  for (std::size_t b = 0; b < orig_sizes.size(); ++b) {
    auto bi = prob.add_block("block" + std::to_string(b + 1), constants[b]);
    for (const auto& [v, mtx] : coeffs[b]) prob.add_term(bi, v, mtx);
  }
  std::vector<double> obj(nvars, 0.0);
  for (std::size_t j = 0; j < zvars.size(); ++j) {
    if (zvars[j].sign < 0) continue;
    obj[zvars[j].orig] = has_header && sense == Sense::maximize ? -c[j] : c[j];
  }
  prob.set_objective(sense, obj, offset);
  prob.validate();
  return prob;
}

}  // namespace twodist

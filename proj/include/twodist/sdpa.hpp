// SDPA sparse (.dat-s) text for ConicProblem instances.
//
// The exported problem is  minimize c^T z  s.t.  sum_j z_j F_j - F_0 >= 0  with
// F_0 = -C and F_j = A_j. Every original variable becomes one nonnegative SDPA
// variable (free ones become a difference of two), and all nonnegativity rows and
// 1x1 blocks share one trailing diagonal block. A comment header records the
// mapping so that import_sdpa can rebuild the original layout.
#pragma once

#include <string>

#include "twodist/conic.hpp"

namespace twodist {

std::string export_sdpa(const ConicProblem& problem);

/// Parses the grammar written by export_sdpa. Without the comment header the
/// result is the plain SDPA problem: free variables, minimize, one block per
/// SDPA block and one 1x1 block per diagonal entry.
/// Throws std::invalid_argument on malformed input.
ConicProblem import_sdpa(const std::string& text);

}  // namespace twodist

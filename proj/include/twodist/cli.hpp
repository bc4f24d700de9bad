#pragma once

#include <iosfwd>

namespace twodist {

/// Entry point of the twodist tool. Exit codes: 0 success, 1 usage error,
/// 2 solver, certification or verification failure (details on err).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twodist

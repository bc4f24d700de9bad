#include "twodist/parallel.hpp"

#include <cstdlib>
#include <string>

namespace twodist {

int default_jobs() {
  const char* env = std::getenv("TWODIST_JOBS");
  if (env == nullptr) return 1;
  try {
    int v = std::stoi(env);
    return v > 0 ? v : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace twodist

#include "rascap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rascap {

Workers Workers::from_env() {
  if (const char* env = std::getenv("RASCAP_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return Workers{static_cast<unsigned>(v)};
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return Workers{hw == 0 ? 1u : hw};
}

}  // namespace rascap

#include "qland/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qland {

unsigned default_worker_count() {
  if (const char* env = std::getenv("QLAND_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace qland

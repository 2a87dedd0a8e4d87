#include "gtsp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gtsp {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GTSP_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // ignore junk, fall through
    }
  }
  return 1;
}

}  // namespace gtsp

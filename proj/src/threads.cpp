#include "spgep/threads.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace spgep::threads {
namespace {

int env_count() {
  int n = omp_get_max_threads();
  if (const char* s = std::getenv("SPARSE_GEP_THREADS")) {
    try {
      const int cap = std::stoi(s);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
      // unparseable value: ignore, keep the OpenMP default
    }
  }
  return n < 1 ? 1 : n;
}

int g_override = 0;

}  // namespace

int count() {
  if (g_override > 0) return g_override;
  static const int n = env_count();
  return n;
}

void set_count_for_testing(int n) { g_override = n; }

}  // namespace spgep::threads

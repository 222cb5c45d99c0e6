#include "deql/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace deql {
namespace {

int initial_threads() {
  if (const char* env = std::getenv("DEQL_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

int& thread_cap() {
  static int cap = initial_threads();
  return cap;
}

}  // namespace

int max_threads() { return thread_cap(); }

void set_max_threads(int n) { thread_cap() = n > 0 ? n : 1; }

}  // namespace deql

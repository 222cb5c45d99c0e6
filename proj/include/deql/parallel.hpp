#pragma once

namespace deql {

// Selects between the OpenMP kernels and their single-threaded reference
// path. Both produce bit-identical results.
enum class Execution { serial, parallel };

// Thread cap used by parallel kernels. Initialised from DEQL_THREADS when set.
int max_threads();
void set_max_threads(int n);

}  // namespace deql

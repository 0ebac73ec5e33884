#pragma once

namespace homsim {

// Hot loops come in two flavours: a plain serial reference and an OpenMP
// version parallelised over independent output entries. Both accumulate each
// entry in the same order, so their results are bit-identical; tests assert
// exact equality and the bench target compares timings.
enum class Execution { serial, parallel };

// Number of threads the parallel path may use (1 without OpenMP).
int max_threads();

// Clamp the OpenMP thread pool; n <= 0 leaves the runtime default.
void set_thread_count(int n);

}  // namespace homsim

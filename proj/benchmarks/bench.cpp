// Timing comparison of the serial reference loops against the OpenMP paths.
// Kernel builds include their spectral physicality gate (a serial Jacobi
// eigensolve), which bounds the achievable speedup of those rows.
// Results must match bitwise (asserted here as well as in the unit tests);
// speedup depends on the host core count.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "homsim/interference.hpp"
#include "homsim/kernel.hpp"
#include "homsim/parallel.hpp"
#include "homsim/schmidt.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = clock_type::now();
    fn();
    const auto stop = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
              name.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
  using namespace homsim;
  std::printf("threads available: %d\n\n", max_threads());

  const int n = 256;
  const int nz = 256;
  const TimeGrid grid = make_grid(n, 1.0, QuadratureRule::gauss_legendre);

  {
    MemoryKernel serial = kernel_fast_memory(grid, 1.0, nz, Execution::serial);
    MemoryKernel parallel = kernel_fast_memory(grid, 1.0, nz, Execution::parallel);
    const double ts = time_ms([&] { kernel_fast_memory(grid, 1.0, nz, Execution::serial); }, 3);
    const double tp =
        time_ms([&] { kernel_fast_memory(grid, 1.0, nz, Execution::parallel); }, 3);
    report("fast-memory kernel build", ts, tp, serial.matrix() == parallel.matrix());

    const Matrix cs = weighted_commutator_matrix(serial, Execution::serial);
    const Matrix cp = weighted_commutator_matrix(serial, Execution::parallel);
    const double cts =
        time_ms([&] { weighted_commutator_matrix(serial, Execution::serial); }, 3);
    const double ctp =
        time_ms([&] { weighted_commutator_matrix(serial, Execution::parallel); }, 3);
    report("commutator matrix", cts, ctp, cs == cp);

    const SchmidtDecomposition dec = decompose(serial);
    const Matrix rs = reconstruct(dec, Execution::serial).matrix();
    const Matrix rp = reconstruct(dec, Execution::parallel).matrix();
    const double rts = time_ms([&] { reconstruct(dec, Execution::serial); }, 3);
    const double rtp = time_ms([&] { reconstruct(dec, Execution::parallel); }, 3);
    report("kernel reconstruction", rts, rtp, rs == rp);
  }

  {
    MemoryKernel gs = kernel_gaussian_toy(grid, 0.1, 0.9, Execution::serial);
    MemoryKernel gp = kernel_gaussian_toy(grid, 0.1, 0.9, Execution::parallel);
    const double ts =
        time_ms([&] { kernel_gaussian_toy(grid, 0.1, 0.9, Execution::serial); }, 3);
    const double tp =
        time_ms([&] { kernel_gaussian_toy(grid, 0.1, 0.9, Execution::parallel); }, 3);
    report("gaussian-toy kernel build", ts, tp, gs.matrix() == gp.matrix());
  }

  {
    const TimeGrid small = make_grid(64, 1.0, QuadratureRule::gauss_legendre);
    const SchmidtDecomposition dec = decompose(kernel_fast_memory(small, 4.0, 64));
    const TemporalEnvelope base = TemporalEnvelope::gaussian(small, 0.25, 1.0 / 16.0);
    std::vector<double> delays;
    for (int i = 0; i < 256; ++i) delays.push_back(0.5 * i / 255.0);

    DelaySweepOptions serial_opts, parallel_opts;
    serial_opts.exec = Execution::serial;
    parallel_opts.exec = Execution::parallel;
    // Envelope weight outside the retained modes goes to loss; fine here,
    // those modes carry lambda < 1e-12.
    serial_opts.statistics.truncation_bound = 1.0;
    parallel_opts.statistics.truncation_bound = 1.0;
    const std::size_t cutoff = dec.retained();
    auto run = [&](const DelaySweepOptions& opts) {
      return delay_sweep(dec, base, delays, cutoff, opts);
    };
    const auto rs = run(serial_opts);
    const auto rp = run(parallel_opts);
    bool same = rs.size() == rp.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i)
      same = rs[i].statistics.p11 == rp[i].statistics.p11 &&
             rs[i].statistics.p20 == rp[i].statistics.p20;
    const double ts = time_ms([&] { run(serial_opts); }, 3);
    const double tp = time_ms([&] { run(parallel_opts); }, 3);
    report("delay sweep (256 points)", ts, tp, same);
  }

  return 0;
}

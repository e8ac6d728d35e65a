// Compares the parallel table kernel against the serial reference on a large
// bounded support and checks that the two agree bit for bit.
#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rpq/distributions.hpp"

using namespace rpq;

namespace {

template <class F>
double best_ms(F&& f, int reps) {
  double best = 1e99;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto dt = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - t0);
    if (dt.count() < best) best = dt.count();
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp disabled, serial kernels only\n");
#endif
  auto alg = make_preset_algebra<double>("jagannathan-srinivasa", 0.9, 0.5);
  int mismatches = 0;

  auto run_case = [&](const char* label, const DistributionSpec<double>& d) {
    auto serial = pmf_table_serial(d);
    auto parallel = pmf_table(d);
    bool identical = serial.entries == parallel.entries &&
                     serial.normalization_defect == parallel.normalization_defect;
    if (!identical) ++mismatches;
    double ms_s = best_ms([&] { pmf_table_serial(d); }, 3);
    double ms_p = best_ms([&] { pmf_table(d); }, 3);
    std::printf("%-28s %8zu entries  serial %8.2f ms  parallel %8.2f ms  x%.2f  %s\n",
                label, serial.entries.size(), ms_s, ms_p, ms_s / ms_p,
                identical ? "bit-identical" : "MISMATCH");
  };

  run_case("first-kind n=80 k=3",
           make_distribution(Kind::first_kind, alg, 80,
                             std::vector<double>{0.3, 0.2, 0.25}));
  // the inverse-weight factor tau1^(-C(n,2)) caps how far n can go here
  run_case("second-kind n=100 k=2",
           make_distribution(Kind::second_kind, alg, 100,
                             std::vector<double>{0.3, 0.2}));
  run_case("negative-second n=6 k=2",
           make_distribution(Kind::negative_second_kind, alg, 6,
                             std::vector<double>{0.4, 0.35}));

  return mismatches == 0 ? 0 : 1;
}

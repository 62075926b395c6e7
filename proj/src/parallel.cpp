#include "fkpde/parallel.hpp"

#include <atomic>

namespace fkpde {

namespace {
std::atomic<int> g_threads{0};
}

void set_num_threads(int threads) { g_threads = threads > 0 ? threads : 0; }

int num_threads() {
  const int t = g_threads.load();
  if (t > 0) return t;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace fkpde

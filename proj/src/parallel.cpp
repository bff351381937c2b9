#include "sideinfo/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sideinfo {

namespace {
int g_default = 0;
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) {
#ifdef _OPENMP
  if (g_default == 0) g_default = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default);
#else
  (void)n;
  (void)g_default;
#endif
}

}  // namespace sideinfo

#include "rwhull/parallel.hpp"

#include <omp.h>

namespace rwhull {

int Parallelism::resolved() const { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace rwhull

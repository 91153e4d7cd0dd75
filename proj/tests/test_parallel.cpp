#include <doctest.h>

#include <numeric>

#include "vbmo/common.hpp"
#include "vbmo/parallel.hpp"

using namespace vbmo;

TEST_CASE("short sums follow the plain left-to-right order") {
  std::vector<double> x{0.1, 0.2, 0.3, 1e16, -1e16, 0.4};
  double s = 0.0;
  for (double v : x) s += v;
  CHECK(tree_sum(x) == s);
}

TEST_CASE("integer-valued sums are exact") {
  std::vector<double> x(100000);
  std::iota(x.begin(), x.end(), 1.0);
  CHECK(tree_sum(x) == 100000.0 * 100001.0 / 2.0);
}

TEST_CASE("serial and threaded reductions agree bitwise") {
  Rng rng(5);
  for (std::size_t n : {0ul, 1ul, 255ul, 256ul, 257ul, 10000ul, 65537ul}) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    CHECK(tree_sum(x.data(), n, Exec::serial) == tree_sum(x.data(), n, Exec::omp));
    CHECK(tree_sum(x.data(), n, Exec::serial) == tree_sum(x));
  }
}

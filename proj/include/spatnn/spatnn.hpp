#pragma once

// spatnn: nearest-neighbor contingency table tests of spatial segregation and
// association, Cuzick-Edwards k-NN tests, second-order summaries, and the
// Monte Carlo size/power harness.

#include "spatnn/errors.hpp"
#include "spatnn/geometry.hpp"
#include "spatnn/knn_tests.hpp"
#include "spatnn/moments.hpp"
#include "spatnn/nnct.hpp"
#include "spatnn/nnct_tests.hpp"
#include "spatnn/numerics.hpp"
#include "spatnn/parallel.hpp"
#include "spatnn/permutation.hpp"
#include "spatnn/rng.hpp"
#include "spatnn/second_order.hpp"
#include "spatnn/sim.hpp"

#pragma once

#include "cscx/linalg.hpp"

namespace cscx {

// Chebyshev-Lobatto collocation on [-1, 1].  Nodes are returned in the
// standard descending order x_0 = 1 ... x_N = -1, and D maps point values to
// derivative values at the same nodes.
struct ChebCollocation {
  Vec x;   // N+1 nodes, descending
  Mat d1;  // first-derivative matrix
  Mat d2;  // d1^2
  Mat d3;  // d1^3
  Mat d4;  // d1^4
};

ChebCollocation cheb_collocation(std::size_t n);

// Barycentric interpolation weights for the same node set.
Vec cheb_bary_weights(std::size_t n);

}  // namespace cscx

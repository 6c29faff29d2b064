#include "cscx/cheb.hpp"

#include <cmath>

#include "cscx/common.hpp"

namespace cscx {

ChebCollocation cheb_collocation(std::size_t n) {
  require(n >= 2, Status::InvalidArgument, "cheb_collocation: need n >= 2");
  const std::size_t np = n + 1;
  ChebCollocation cc;
  cc.x.resize(np);
  for (std::size_t i = 0; i < np; ++i) cc.x[i] = std::cos(M_PI * double(i) / double(n));

  // Endpoint weights are doubled with alternating signs.
  Vec c(np, 1.0);
  c[0] = 2.0;
  c[n] = 2.0;
  for (std::size_t i = 0; i < np; ++i)
    if (i % 2 == 1) c[i] = -c[i];

  Mat d(np, np);
  for (std::size_t i = 0; i < np; ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      if (i == j) continue;
      const double v = (c[i] / c[j]) / (cc.x[i] - cc.x[j]);
      d(i, j) = v;
      rowsum += v;
    }
    // negative-sum trick: exact derivative of constants
    d(i, i) = -rowsum;
  }

  cc.d1 = d;
  cc.d2 = matmul(cc.d1, cc.d1);
  cc.d3 = matmul(cc.d2, cc.d1);
  cc.d4 = matmul(cc.d3, cc.d1);
  return cc;
}

Vec cheb_bary_weights(std::size_t n) {
  Vec w(n + 1, 1.0);
  w[0] = 0.5;
  w[n] = 0.5;
  for (std::size_t i = 0; i <= n; ++i)
    if (i % 2 == 1) w[i] = -w[i];
  return w;
}

}  // namespace cscx

#include "cscx/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cscx/common.hpp"

namespace cscx {

Mat matmul(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), Status::WrongDimension, "matmul: shape mismatch");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec matvec(const Mat& a, const Vec& x) {
  require(a.cols() == x.size(), Status::WrongDimension, "matvec: shape mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// In-place LU with partial pivoting; perm receives the row permutation.
void lu_factor(Mat& a, std::vector<std::size_t>& perm) {
  const std::size_t n = a.rows();
  require(a.cols() == n, Status::WrongDimension, "lu_factor: matrix not square");
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    require(best > 0.0, Status::SingularMatrix, "lu_factor: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(perm[k], perm[p]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) * inv;
      a(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
}

Vec lu_apply(const Mat& lu, const std::vector<std::size_t>& perm, const Vec& b) {
  const std::size_t n = lu.rows();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x[j];
    x[ii] = s / lu(ii, ii);
  }
  return x;
}

}  // namespace

Vec lu_solve(Mat a, Vec b) {
  require(a.rows() == b.size(), Status::WrongDimension, "lu_solve: shape mismatch");
  std::vector<std::size_t> perm;
  lu_factor(a, perm);
  return lu_apply(a, perm, b);
}

Mat lu_solve(Mat a, Mat b) {
  require(a.rows() == b.rows(), Status::WrongDimension, "lu_solve: shape mismatch");
  std::vector<std::size_t> perm;
  lu_factor(a, perm);
  Mat x(b.rows(), b.cols());
  Vec col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    Vec sol = lu_apply(a, perm, col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

Mat inverse(const Mat& a) { return lu_solve(a, Mat::identity(a.rows())); }

Vec lstsq(const Mat& a, const Vec& b) {
  require(a.rows() == b.size(), Status::WrongDimension, "lstsq: shape mismatch");
  const std::size_t n = a.cols();
  Mat ata(n, n);
  Vec atb(n, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    for (std::size_t p = 0; p < n; ++p) {
      atb[p] += row[p] * b[i];
      for (std::size_t q = 0; q < n; ++q) ata(p, q) += row[p] * row[q];
    }
  }
  return lu_solve(std::move(ata), std::move(atb));
}

LineFit fit_line(const Vec& x, const Vec& y) {
  require(x.size() == y.size() && x.size() >= 2, Status::InsufficientWindow,
          "fit_line: need at least two points");
  Mat a(x.size(), 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
  }
  Vec c = lstsq(a, y);
  LineFit f;
  f.intercept = c[0];
  f.slope = c[1];
  for (std::size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(c[0] + c[1] * x[i] - y[i]));
  return f;
}

}  // namespace cscx

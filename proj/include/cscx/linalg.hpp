#pragma once

#include <cstddef>
#include <vector>

namespace cscx {

using Vec = std::vector<double>;

// Dense row-major matrix.  Problem sizes here top out around 10^2, so a flat
// buffer with partial-pivot LU is all the machinery needed.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : r_(rows), c_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  double* row(std::size_t i) { return a_.data() + i * c_; }
  const double* row(std::size_t i) const { return a_.data() + i * c_; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<double> a_;
};

Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);
double dot(const Vec& a, const Vec& b);
double max_abs(const Vec& v);

// Solves a x = b by partial-pivot LU.  Throws Status::SingularMatrix when a
// pivot collapses.
Vec lu_solve(Mat a, Vec b);

// Solves for several right-hand sides (columns of b) at once.
Mat lu_solve(Mat a, Mat b);

Mat inverse(const Mat& a);

// Least squares via normal equations; adequate for the small, well-scaled
// fitting problems used here (2-4 unknowns).
Vec lstsq(const Mat& a, const Vec& b);

// Fits y ~ c0 + c1 x and returns {c0, c1}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // max abs deviation of the fit
};
LineFit fit_line(const Vec& x, const Vec& y);

}  // namespace cscx

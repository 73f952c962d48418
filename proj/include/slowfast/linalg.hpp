#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace slowfast {

struct Vec2 {
  std::array<double, 2> v{};

  Vec2() = default;
  Vec2(double a, double b) : v{a, b} {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

struct Vec3 {
  std::array<double, 3> v{};

  Vec3() = default;
  Vec3(double a, double b, double c) : v{a, b, c} {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

// Row-major 2x2.
struct Mat2 {
  std::array<double, 4> m{};

  Mat2() = default;
  Mat2(double a00, double a01, double a10, double a11) : m{a00, a01, a10, a11} {}

  double& operator()(std::size_t i, std::size_t j) { return m[2 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return m[2 * i + j]; }
};

// Row-major 3x3.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }
};

inline double det2(const Mat2& a) {
  return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}

inline double trace2(const Mat2& a) { return a(0, 0) + a(1, 1); }

inline Vec2 mul(const Mat2& a, const Vec2& x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]};
}

inline double quad_form(const Mat2& h, const Vec2& x) {
  return x[0] * (h(0, 0) * x[0] + h(0, 1) * x[1]) +
         x[1] * (h(1, 0) * x[0] + h(1, 1) * x[1]);
}

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vec2 solve2(const Mat2& a, const Vec2& b) {
  const double d = det2(a);
  const double scale = std::fabs(a(0, 0)) + std::fabs(a(0, 1)) +
                       std::fabs(a(1, 0)) + std::fabs(a(1, 1));
  if (std::fabs(d) <= 1e-14 * scale * scale + 1e-300)
    throw SingularMatrixError("solve2: singular 2x2 system");
  return {(b[0] * a(1, 1) - b[1] * a(0, 1)) / d,
          (b[1] * a(0, 0) - b[0] * a(1, 0)) / d};
}

// Gaussian elimination with partial pivoting.
inline Vec3 solve3(Mat3 a, Vec3 b) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 2; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (piv != col) {
      for (int j = 0; j < 3; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
      std::swap(perm[col], perm[piv]);
    }
    if (std::fabs(a(col, col)) < 1e-300)
      throw SingularMatrixError("solve3: singular 3x3 system");
    for (int r = col + 1; r < 3; ++r) {
      const double f = a(r, col) / a(col, col);
      a(r, col) = 0.0;
      for (int j = col + 1; j < 3; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  if (std::fabs(a(2, 2)) < 1e-300)
    throw SingularMatrixError("solve3: singular 3x3 system");
  Vec3 x;
  x[2] = b[2] / a(2, 2);
  x[1] = (b[1] - a(1, 2) * x[2]) / a(1, 1);
  x[0] = (b[0] - a(0, 1) * x[1] - a(0, 2) * x[2]) / a(0, 0);
  return x;
}

// Eigen-structure of a general (non-symmetric) 2x2 matrix from trace/determinant.
struct Eig2 {
  double tr = 0.0;
  double det = 0.0;
  double disc = 0.0;  // tr^2 - 4 det
  bool real = true;
  // real pair: big = larger-magnitude eigenvalue, small = det/big
  // complex pair: big/small hold the common real part
  double big = 0.0;
  double small = 0.0;
};

inline Eig2 eig2(const Mat2& a) {
  Eig2 e;
  e.tr = trace2(a);
  e.det = det2(a);
  e.disc = e.tr * e.tr - 4.0 * e.det;
  if (e.disc >= 0.0) {
    e.real = true;
    const double sq = std::sqrt(e.disc);
    e.big = 0.5 * (e.tr + (e.tr >= 0.0 ? sq : -sq));
    e.small = (e.big != 0.0) ? e.det / e.big : 0.5 * (e.tr - sq);
  } else {
    e.real = false;
    e.big = e.small = 0.5 * e.tr;
  }
  return e;
}

}  // namespace slowfast

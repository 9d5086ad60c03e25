// Copyright 2026 The terradyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small fixed-size vector/matrix types, templated on the scalar so the same
// physics code runs on plain doubles and on tape-recorded variables.

#ifndef TERRADYN_VECMAT_HPP_
#define TERRADYN_VECMAT_HPP_

#include <array>
#include <cmath>

namespace terradyn {

template <class T>
struct Vec3 {
  T x{}, y{}, z{};

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  template <class S>
  friend Vec3 operator*(const S& s, const Vec3& a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  T& operator[](int i) { return i == 0 ? x : i == 1 ? y : z; }
  const T& operator[](int i) const { return i == 0 ? x : i == 1 ? y : z; }

  Vec3& operator+=(const Vec3& b) {
    x = x + b.x;
    y = y + b.y;
    z = z + b.z;
    return *this;
  }
};

using Vec3d = Vec3<double>;

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

template <class T>
T norm(const Vec3<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
Vec3<T> normalized(const Vec3<T>& a) {
  T n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

// Row-major 3x3 matrix.
template <class T>
struct Mat3 {
  std::array<T, 9> m{};

  T& operator()(int r, int c) { return m[3 * r + c]; }
  const T& operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 out;
    out.m = {T(1), T(0), T(0), T(0), T(1), T(0), T(0), T(0), T(1)};
    return out;
  }

  Vec3<T> col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }
  void set_col(int c, const Vec3<T>& v) {
    m[c] = v.x;
    m[3 + c] = v.y;
    m[6 + c] = v.z;
  }

  Mat3 transpose() const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }

  friend Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
    return out;
  }
  friend Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
    return out;
  }
  template <class S>
  friend Mat3 operator*(const S& s, const Mat3& a) {
    Mat3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
    return out;
  }
  friend Vec3<T> operator*(const Mat3& a, const Vec3<T>& v) {
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
  }
  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    return out;
  }
};

using Mat3d = Mat3<double>;

template <class T>
Mat3<T> skew(const Vec3<T>& w) {
  Mat3<T> out;
  out.m = {T(0), -w.z, w.y, w.z, T(0), -w.x, -w.y, w.x, T(0)};
  return out;
}

template <class T>
T determinant(const Mat3<T>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// Adjugate-based inverse; fine for the well-conditioned inertia matrices
// this engine sees, and expressible with tape-recordable primitives.
template <class T>
Mat3<T> inverse(const Mat3<T>& a) {
  T det = determinant(a);
  Mat3<T> out;
  out(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
  out(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
  out(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
  out(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
  out(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
  out(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
  out(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
  out(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
  out(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
  return out;
}

// Frobenius norm of (A^T A - I); used by orthonormality checks.
inline double orthonormality_error(const Mat3d& r) {
  Mat3d e = r.transpose() * r - Mat3d::identity();
  double s = 0;
  for (double v : e.m) s += v * v;
  return std::sqrt(s);
}

// Gram-Schmidt on columns; third axis from the cross product so the result
// is always a proper rotation.
template <class T>
Mat3<T> orthonormalize(const Mat3<T>& r) {
  Vec3<T> c0 = normalized(r.col(0));
  Vec3<T> c1raw = r.col(1);
  Vec3<T> c1 = c1raw - dot(c0, c1raw) * c0;
  c1 = normalized(c1);
  Vec3<T> c2 = cross(c0, c1);
  Mat3<T> out;
  out.set_col(0, c0);
  out.set_col(1, c1);
  out.set_col(2, c2);
  return out;
}

inline Mat3d rot_z(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  Mat3d out;
  out.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return out;
}

inline Mat3d rot_axis_angle(const Vec3d& axis_angle) {
  double angle = norm(axis_angle);
  if (angle < 1e-300) return Mat3d::identity();
  Vec3d a = (1.0 / angle) * axis_angle;
  double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
  Mat3d out;
  out.m = {t * a.x * a.x + c,       t * a.x * a.y - s * a.z,
           t * a.x * a.z + s * a.y, t * a.x * a.y + s * a.z,
           t * a.y * a.y + c,       t * a.y * a.z - s * a.x,
           t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x,
           t * a.z * a.z + c};
  return out;
}

// Rotation logarithm as an axis-angle vector.
inline Vec3d rot_log(const Mat3d& r) {
  double tr = r(0, 0) + r(1, 1) + r(2, 2);
  double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  double angle = std::acos(c);
  if (angle < 1e-12) return {0, 0, 0};
  Vec3d axis{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
  if (angle > M_PI - 1e-6) {
    // Near pi the antisymmetric part degenerates; recover the axis from
    // the symmetric part instead.
    Vec3d d{std::sqrt(std::max(0.0, (r(0, 0) + 1) / 2)),
            std::sqrt(std::max(0.0, (r(1, 1) + 1) / 2)),
            std::sqrt(std::max(0.0, (r(2, 2) + 1) / 2))};
    if (r(0, 1) + r(1, 0) < 0) d.y = -d.y;
    if (r(0, 2) + r(2, 0) < 0) d.z = -d.z;
    return angle * normalized(d);
  }
  return (angle / (2 * std::sin(angle))) * axis;
}

}  // namespace terradyn

#endif  // TERRADYN_VECMAT_HPP_

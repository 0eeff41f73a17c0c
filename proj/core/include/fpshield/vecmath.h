#ifndef FPSHIELD_VECMATH_H_
#define FPSHIELD_VECMATH_H_

#include <cmath>

namespace fpshield {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// Unit quaternion w + xi + yj + zk.
struct Quaternion {
  double w = 1, x = 0, y = 0, z = 0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion normalized() const {
    double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Quaternion operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  // q v q*
  Vec3 rotate(const Vec3& v) const {
    Quaternion p{0, v.x, v.y, v.z};
    Quaternion r = (*this) * p * conjugate();
    return {r.x, r.y, r.z};
  }

  static Quaternion from_axis_angle(const Vec3& axis, double angle) {
    double n = axis.norm();
    double s = std::sin(angle / 2) / n;
    return {std::cos(angle / 2), axis.x * s, axis.y * s, axis.z * s};
  }

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

}  // namespace fpshield

#endif  // FPSHIELD_VECMATH_H_

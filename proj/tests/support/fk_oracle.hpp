#pragma once

// Plain 4x4 row-major matrix chain built straight from the robot JSON. Shares
// no code with the library kinematics.

#include <array>
#include <cmath>
#include <string>

#include <json.hpp>

namespace surrogate::test {

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat4 translation(double x, double y, double z) {
  Mat4 m = identity4();
  m[0][3] = x;
  m[1][3] = y;
  m[2][3] = z;
  return m;
}

// Rodrigues formula for a unit axis.
inline Mat4 rotation(double ax, double ay, double az, double angle) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  ax /= n, ay /= n, az /= n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Mat4 m = identity4();
  m[0][0] = t * ax * ax + c;
  m[0][1] = t * ax * ay - s * az;
  m[0][2] = t * ax * az + s * ay;
  m[1][0] = t * ax * ay + s * az;
  m[1][1] = t * ay * ay + c;
  m[1][2] = t * ay * az - s * ax;
  m[2][0] = t * ax * az - s * ay;
  m[2][1] = t * ay * az + s * ax;
  m[2][2] = t * az * az + c;
  return m;
}

inline Mat4 rpy(double r, double p, double y) {
  return mul(rotation(0, 0, 1, y), mul(rotation(0, 1, 0, p), rotation(1, 0, 0, r)));
}

inline Mat4 json_transform(const nlohmann::json& v) {
  if (v.is_array()) return translation(v[0], v[1], v[2]);
  Mat4 m = identity4();
  if (v.contains("xyz")) m = translation(v["xyz"][0], v["xyz"][1], v["xyz"][2]);
  if (v.contains("rpy")) m = mul(m, rpy(v["rpy"][0], v["rpy"][1], v["rpy"][2]));
  return m;
}

/// Gripper frame in the base frame for the named arm.
inline Mat4 oracle_gripper(const nlohmann::json& robot, const std::string& side, const std::array<double, 7>& q,
                           double lift) {
  const auto& arm = robot["arms"][side];
  Mat4 T = mul(translation(0, 0, lift), json_transform(arm["mount"]));
  for (int i = 0; i < 7; ++i) {
    const auto& j = arm["joints"][i];
    if (j.contains("origin")) T = mul(T, json_transform(j["origin"]));
    T = mul(T, rotation(j["axis"][0], j["axis"][1], j["axis"][2], q[i]));
  }
  return mul(T, json_transform(arm["tool"]));
}

inline std::array<double, 3> apply(const Mat4& m, double x, double y, double z) {
  return {m[0][0] * x + m[0][1] * y + m[0][2] * z + m[0][3], m[1][0] * x + m[1][1] * y + m[1][2] * z + m[1][3],
          m[2][0] * x + m[2][1] * y + m[2][2] * z + m[2][3]};
}

// Pinhole oracle: camera link frame given as a 4x4 (x forward, y left, z up).
inline std::array<double, 2> oracle_pixel(const Mat4& cam, double fx, double fy, double cx, double cy,
                                          const std::array<double, 3>& p) {
  const double dx = p[0] - cam[0][3], dy = p[1] - cam[1][3], dz = p[2] - cam[2][3];
  // inverse rotation = transpose
  const double lx = cam[0][0] * dx + cam[1][0] * dy + cam[2][0] * dz;
  const double ly = cam[0][1] * dx + cam[1][1] * dy + cam[2][1] * dz;
  const double lz = cam[0][2] * dx + cam[1][2] * dy + cam[2][2] * dz;
  return {cx + fx * (-ly) / lx, cy + fy * (-lz) / lx};
}

}  // namespace surrogate::test

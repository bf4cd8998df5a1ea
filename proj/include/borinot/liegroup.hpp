// Copyright 2026 The Borinot Control Authors
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

// SO(3) / SE(3) arithmetic for floating-base states.
//
// Tangent vectors are ordered (linear, angular). The manifold difference uses
// the right-perturbation convention everywhere in this library:
//
//   p ⊕ v = p ∘ exp(v)
//   a ⊖ b = log(b⁻¹ ∘ a)
//
// so errors are expressed in the body frame of the second argument.

#ifndef BORINOT_LIEGROUP_HPP_
#define BORINOT_LIEGROUP_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace borinot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Skew-symmetric matrix such that skew(a) * b = a.cross(b).
Mat3 skew(const Vec3& a);

/// Unit quaternion rotation kept in canonical form (w >= 0; for w == 0 the
/// largest-magnitude vector component is positive).
class Rotation {
 public:
  Rotation() = default;

  /// Normalizes and canonicalizes the given (w, x, y, z).
  static Rotation FromQuaternion(double w, double x, double y, double z);
  static Rotation FromMatrix(const Mat3& m);
  /// Intrinsic Z-Y-X (yaw, pitch, roll) convention: R = Rz(yaw) Ry(pitch) Rx(roll).
  static Rotation FromRpy(double roll, double pitch, double yaw);
  static Rotation Exp(const Vec3& phi);

  Vec3 Log() const;
  Rotation Inverse() const;
  Rotation operator*(const Rotation& other) const;
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  Mat3 Matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& Quaternion() const { return q_; }
  /// Roll, pitch, yaw matching FromRpy.
  Vec3 Rpy() const;

 private:
  explicit Rotation(const Eigen::Quaterniond& q);
  void Canonicalize();

  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

struct Tangent6 {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Tangent6() = default;
  Tangent6(const Vec3& lin, const Vec3& ang) : linear(lin), angular(ang) {}

  static Tangent6 FromVector(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
  }
  Vec6 Vector() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }

  Tangent6 operator+(const Tangent6& o) const {
    return {linear + o.linear, angular + o.angular};
  }
  Tangent6 operator-(const Tangent6& o) const {
    return {linear - o.linear, angular - o.angular};
  }
  Tangent6 operator*(double s) const { return {linear * s, angular * s}; }
  Tangent6 operator-() const { return {-linear, -angular}; }
};

inline Tangent6 operator*(double s, const Tangent6& t) { return t * s; }

class Pose {
 public:
  Pose() = default;
  Pose(const Rotation& r, const Vec3& t) : rotation_(r), translation_(t) {}

  static Pose Identity() { return {}; }

  const Rotation& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Pose operator*(const Pose& other) const;
  Vec3 Act(const Vec3& point) const { return rotation_ * point + translation_; }
  Pose Inverse() const;

  /// 4x4 homogeneous matrix.
  Eigen::Matrix4d Homogeneous() const;

 private:
  Rotation rotation_;
  Vec3 translation_ = Vec3::Zero();
};

// SO(3) Jacobians. Right Jacobian satisfies Exp(phi + d) ≈ Exp(phi) Exp(Jr d).
Mat3 So3RightJacobian(const Vec3& phi);
Mat3 So3RightJacobianInverse(const Vec3& phi);
Mat3 So3LeftJacobian(const Vec3& phi);
Mat3 So3LeftJacobianInverse(const Vec3& phi);

Pose Exp(const Tangent6& tau);
Tangent6 Log(const Pose& p);

/// p ⊕ v = p ∘ exp(v).
Pose BoxPlus(const Pose& p, const Tangent6& v);
/// a ⊖ b = log(b⁻¹ ∘ a).
Tangent6 BoxMinus(const Pose& a, const Pose& b);

// SE(3) Jacobians on (linear, angular) tangent vectors.
Mat6 Se3RightJacobian(const Tangent6& tau);
Mat6 Se3RightJacobianInverse(const Tangent6& tau);

/// Adjoint of a pose acting on (linear, angular) twists.
Mat6 Adjoint(const Pose& p);

}  // namespace borinot

#endif  // BORINOT_LIEGROUP_HPP_

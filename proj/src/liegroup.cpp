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

#include "borinot/liegroup.hpp"

#include <algorithm>
#include <cmath>

namespace borinot {
namespace {

// Below this angle the closed forms switch to Taylor expansions.
constexpr double kSmallAngle = 1e-5;
// The SE(3) Q-matrix coefficients lose precision earlier.
constexpr double kSmallAngleQ = 1e-3;

// (1 - cos t) / t^2
double CoeffA(double t) {
  if (t < kSmallAngle) return 0.5 - t * t / 24.0;
  return (1.0 - std::cos(t)) / (t * t);
}

// (t - sin t) / t^3
double CoeffB(double t) {
  if (t < kSmallAngle) return 1.0 / 6.0 - t * t / 120.0;
  return (t - std::sin(t)) / (t * t * t);
}

// 1/t^2 - (1 + cos t) / (2 t sin t)
double CoeffInv(double t) {
  if (t < kSmallAngle) return 1.0 / 12.0 + t * t / 720.0;
  // (1 + cos t) / sin t = cot(t / 2), finite at t = pi.
  return 1.0 / (t * t) - 1.0 / (2.0 * t * std::tan(0.5 * t));
}

Mat3 SecondOrderQ(const Vec3& rho, const Vec3& phi) {
  const double t = phi.norm();
  const Mat3 rx = skew(rho);
  const Mat3 px = skew(phi);
  double c1, c2, c3;
  if (t < kSmallAngleQ) {
    const double t2 = t * t;
    c1 = 1.0 / 6.0 - t2 / 120.0;
    c2 = 1.0 / 24.0 - t2 / 720.0;
    c3 = 1.0 / 120.0 - t2 / 2520.0;
  } else {
    const double s = std::sin(t);
    const double c = std::cos(t);
    c1 = (t - s) / (t * t * t);
    c2 = (t * t + 2.0 * c - 2.0) / (2.0 * t * t * t * t);
    c3 = (2.0 * t - 3.0 * s + t * c) / (2.0 * t * t * t * t * t);
  }
  const Mat3 prp = px * rx * px;
  return 0.5 * rx + c1 * (px * rx + rx * px + prp) +
         c2 * (px * px * rx + rx * px * px - 3.0 * prp) +
         c3 * (prp * px + px * prp);
}

}  // namespace

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),  //
      a.z(), 0.0, -a.x(),   //
      -a.y(), a.x(), 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Rotation

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(q) { Canonicalize(); }

void Rotation::Canonicalize() {
  q_.normalize();
  if (q_.w() < 0.0) {
    q_.coeffs() *= -1.0;
  } else if (q_.w() == 0.0) {
    const Vec3 v = q_.vec();
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    if (v[i] < 0.0) q_.coeffs() *= -1.0;
  }
}

Rotation Rotation::FromQuaternion(double w, double x, double y, double z) {
  return Rotation(Eigen::Quaterniond(w, x, y, z));
}

Rotation Rotation::FromMatrix(const Mat3& m) {
  return Rotation(Eigen::Quaterniond(m));
}

Rotation Rotation::FromRpy(double roll, double pitch, double yaw) {
  const Eigen::Quaterniond q =
      Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
      Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
      Eigen::AngleAxisd(roll, Vec3::UnitX());
  return Rotation(q);
}

Rotation Rotation::Exp(const Vec3& phi) {
  const double t = phi.norm();
  const double half = 0.5 * t;
  double w, k;
  if (t < kSmallAngle) {
    w = 1.0 - t * t / 8.0;
    k = 0.5 - t * t / 48.0;
  } else {
    w = std::cos(half);
    k = std::sin(half) / t;
  }
  return Rotation(Eigen::Quaterniond(w, k * phi.x(), k * phi.y(), k * phi.z()));
}

Vec3 Rotation::Log() const {
  const Vec3 v = q_.vec();
  const double n = v.norm();
  const double w = q_.w();
  double k;
  if (n < kSmallAngle) {
    // 2 atan(n / w) / n for w close to 1.
    k = 2.0 / w * (1.0 - n * n / (3.0 * w * w));
  } else {
    k = 2.0 * std::atan2(n, w) / n;
  }
  return k * v;
}

Rotation Rotation::Inverse() const { return Rotation(q_.conjugate()); }

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(q_ * other.q_);
}

Vec3 Rotation::Rpy() const {
  const Mat3 r = Matrix();
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

// ---------------------------------------------------------------------------
// Pose

Pose Pose::operator*(const Pose& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

Pose Pose::Inverse() const {
  const Rotation inv = rotation_.Inverse();
  return {inv, -(inv * translation_)};
}

Eigen::Matrix4d Pose::Homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.Matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

// ---------------------------------------------------------------------------
// Jacobians

Mat3 So3LeftJacobian(const Vec3& phi) {
  const double t = phi.norm();
  const Mat3 px = skew(phi);
  return Mat3::Identity() + CoeffA(t) * px + CoeffB(t) * px * px;
}

Mat3 So3LeftJacobianInverse(const Vec3& phi) {
  const double t = phi.norm();
  const Mat3 px = skew(phi);
  return Mat3::Identity() - 0.5 * px + CoeffInv(t) * px * px;
}

Mat3 So3RightJacobian(const Vec3& phi) { return So3LeftJacobian(-phi); }

Mat3 So3RightJacobianInverse(const Vec3& phi) {
  return So3LeftJacobianInverse(-phi);
}

Mat6 Se3RightJacobian(const Tangent6& tau) {
  const Mat3 jr = So3RightJacobian(tau.angular);
  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>() = jr;
  j.bottomRightCorner<3, 3>() = jr;
  j.topRightCorner<3, 3>() = SecondOrderQ(-tau.linear, -tau.angular);
  return j;
}

Mat6 Se3RightJacobianInverse(const Tangent6& tau) {
  const Mat3 jinv = So3RightJacobianInverse(tau.angular);
  const Mat3 q = SecondOrderQ(-tau.linear, -tau.angular);
  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>() = jinv;
  j.bottomRightCorner<3, 3>() = jinv;
  j.topRightCorner<3, 3>() = -jinv * q * jinv;
  return j;
}

Mat6 Adjoint(const Pose& p) {
  const Mat3 r = p.rotation().Matrix();
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.bottomRightCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = skew(p.translation()) * r;
  return ad;
}

// ---------------------------------------------------------------------------
// exp / log

Pose Exp(const Tangent6& tau) {
  const Rotation r = Rotation::Exp(tau.angular);
  return {r, So3LeftJacobian(tau.angular) * tau.linear};
}

Tangent6 Log(const Pose& p) {
  const Vec3 phi = p.rotation().Log();
  return {So3LeftJacobianInverse(phi) * p.translation(), phi};
}

Pose BoxPlus(const Pose& p, const Tangent6& v) { return p * Exp(v); }

Tangent6 BoxMinus(const Pose& a, const Pose& b) { return Log(b.Inverse() * a); }

}  // namespace borinot

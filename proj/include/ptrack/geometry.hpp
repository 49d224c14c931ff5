#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptrack {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Single-target state ordered [x, vx, y, vy] (m, m/s).
template <typename Scalar>
using StateVec = Eigen::Matrix<Scalar, 4, 1>;

using Vector2 = Vec2<double>;
using TargetState = StateVec<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Ranges below this are treated as a target sitting on the sensor.
inline constexpr double kCoincidenceTolerance = 1e-9;

class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Derived>
Vec2<typename Derived::Scalar> position_of(const Eigen::MatrixBase<Derived>& x) {
  return {x(0), x(2)};
}

template <typename Derived>
Vec2<typename Derived::Scalar> velocity_of(const Eigen::MatrixBase<Derived>& x) {
  return {x(1), x(3)};
}

template <typename Scalar>
StateVec<Scalar> make_state(const Vec2<Scalar>& position, const Vec2<Scalar>& velocity) {
  StateVec<Scalar> x;
  x << position.x(), velocity.x(), position.y(), velocity.y();
  return x;
}

template <typename Scalar>
struct BasicSensorPose {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
};

using SensorPose = BasicSensorPose<double>;

/// Joint time/frequency difference of arrival for one ordered pair (s, Hz).
template <typename Scalar>
struct DifferenceOfArrival {
  Scalar dt{0};
  Scalar df{0};
};

using PairMeasurement = DifferenceOfArrival<double>;

/// Two stationary sensors l1, l2 with the derived baseline length B and the
/// bearing alpha0 of the l1 -> l2 baseline measured from +x.
template <typename Scalar>
class BasicSensorPair {
 public:
  BasicSensorPair(BasicSensorPose<Scalar> first, BasicSensorPose<Scalar> second)
      : first_(first), second_(second) {
    if (!first_.position.allFinite() || !second_.position.allFinite()) {
      throw GeometryError("sensor position must be finite");
    }
    const Vec2<Scalar> d = second_.position - first_.position;
    baseline_length_ = d.norm();
    if (!(baseline_length_ > Scalar(0))) {
      throw GeometryError("sensor pair has zero baseline");
    }
    baseline_bearing_ = std::atan2(d.y(), d.x());
    direction_ = d / baseline_length_;
  }

  const BasicSensorPose<Scalar>& first() const { return first_; }
  const BasicSensorPose<Scalar>& second() const { return second_; }
  Scalar baseline_length() const { return baseline_length_; }
  Scalar baseline_bearing() const { return baseline_bearing_; }
  /// Unit vector l1 -> l2.
  const Vec2<Scalar>& baseline_direction() const { return direction_; }
  /// Left-hand normal of the baseline direction.
  Vec2<Scalar> baseline_normal() const { return {-direction_.y(), direction_.x()}; }

  /// Coordinates in the frame with l1 at the origin and l2 at (B, 0).
  Vec2<Scalar> to_baseline_frame(const Vec2<Scalar>& p) const {
    const Vec2<Scalar> d = p - first_.position;
    return {d.dot(direction_), d.dot(baseline_normal())};
  }

  Vec2<Scalar> from_baseline_frame(const Vec2<Scalar>& local) const {
    return first_.position + local.x() * direction_ + local.y() * baseline_normal();
  }

  /// Rotates a local-frame vector (e.g. a velocity) into the world frame.
  Vec2<Scalar> rotate_from_baseline_frame(const Vec2<Scalar>& v) const {
    return v.x() * direction_ + v.y() * baseline_normal();
  }

 private:
  BasicSensorPose<Scalar> first_;
  BasicSensorPose<Scalar> second_;
  Scalar baseline_length_{0};
  Scalar baseline_bearing_{0};
  Vec2<Scalar> direction_ = Vec2<Scalar>::UnitX();
};

using SensorPair = BasicSensorPair<double>;

template <typename Scalar, typename Derived>
Scalar range(const BasicSensorPose<Scalar>& sensor, const Eigen::MatrixBase<Derived>& state) {
  return (position_of(state) - sensor.position).norm();
}

/// Signed time derivative of range; positive when the target recedes.
template <typename Scalar, typename Derived>
Scalar range_rate(const BasicSensorPose<Scalar>& sensor, const Eigen::MatrixBase<Derived>& state) {
  const Vec2<Scalar> d = position_of(state) - sensor.position;
  const Scalar r = d.norm();
  if (r < Scalar(kCoincidenceTolerance)) {
    throw GeometryError("range rate undefined: target coincides with sensor");
  }
  return d.dot(velocity_of(state)) / r;
}

/// Noiseless (dt, df) for the ordered pair: dt = (r1 - r2)/c, df = fc/c (rdot1 - rdot2).
template <typename Scalar, typename Derived>
DifferenceOfArrival<Scalar> predict_measurement(const BasicSensorPair<Scalar>& pair,
                                                const Eigen::MatrixBase<Derived>& state,
                                                Scalar carrier_hz, Scalar c = Scalar(kSpeedOfLight)) {
  const Scalar r1 = range(pair.first(), state);
  const Scalar r2 = range(pair.second(), state);
  const Scalar rdot1 = range_rate(pair.first(), state);
  const Scalar rdot2 = range_rate(pair.second(), state);
  return {(r1 - r2) / c, carrier_hz / c * (rdot1 - rdot2)};
}

/// Angles at l1 and l2. alpha is measured from the outward extension of the
/// baseline behind l1, so r2^2 = r1^2 + B^2 + 2 B r1 cos(alpha) and alpha = pi
/// places the target on the segment. beta is the interior triangle angle at
/// l2, which makes alpha - beta the apex angle between the two sensor-to-target
/// lines of sight. Both lie in [0, pi].
template <typename Scalar>
struct InteriorAngles {
  Scalar alpha{0};
  Scalar beta{0};
};

template <typename Scalar>
InteriorAngles<Scalar> interior_angles(const BasicSensorPair<Scalar>& pair, const Vec2<Scalar>& position) {
  const Vec2<Scalar> local = pair.to_baseline_frame(position);
  const Scalar b = pair.baseline_length();
  const Scalar h = std::abs(local.y());
  if (Vec2<Scalar>(local.x(), h).norm() < Scalar(kCoincidenceTolerance) ||
      Vec2<Scalar>(b - local.x(), h).norm() < Scalar(kCoincidenceTolerance)) {
    throw GeometryError("interior angles undefined: target coincides with sensor");
  }
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar at_first = std::atan2(h, local.x());
  const Scalar at_second = std::atan2(h, b - local.x());
  return {pi - at_first, at_second};
}

}  // namespace ptrack

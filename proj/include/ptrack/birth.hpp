#pragma once

#include "ptrack/geometry.hpp"
#include "ptrack/models.hpp"
#include "ptrack/particles.hpp"
#include "ptrack/random.hpp"

#include <stdexcept>
#include <vector>

namespace ptrack {

struct BirthConfig {
  double max_range = 2000.0;  // from l1, m
  double max_speed = 25.0;    // m/s
  int particles_per_measurement = 500;
  double expected_births = 1e-4;  // per predict step
  int max_retries = 100;

  void validate() const;
};

/// Raised when a measurement admits no state consistent with the sampler bounds.
class BirthSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PositionSample {
  Vector2 position = Vector2::Zero();
  double range_difference = 0.0;  // sampled r1 - r2, m
  double first_range = 0.0;       // r1, m
  double alpha = 0.0;             // rad, see InteriorAngles
  bool upper_branch = true;       // left of the l1 -> l2 baseline
};

struct VelocitySample {
  Vector2 velocity = Vector2::Zero();
  double range_rate_difference = 0.0;  // sampled rdot1 - rdot2, m/s
  double theta = 0.0;                  // heading relative to the l2 line of sight, rad
  double speed = 0.0;
  bool other_heading = false;  // pi - arcsin solution taken
  /// False only on the collinear singularity where FDOA carries no heading
  /// information and the velocity is drawn without it.
  bool fdoa_constrained = true;
};

struct BirthSample {
  TargetState state = TargetState::Zero();
  PositionSample position;
  VelocitySample velocity;
};

/// Point on the TDOA hyperbola with range r1 from l1. Inverts
/// r1 = (dr^2 - B^2) / (2 (dr + B cos alpha)) for alpha; needs
/// (dr + B)/2 <= r1 and |dr| < B.
PositionSample position_on_hyperbola(const SensorPair& pair, double range_difference, double first_range,
                                     bool upper_branch);

/// Velocity of the given speed at `position` whose range-rate difference is
/// `range_rate_difference`. The heading solves
///   drdot = -2 |v| sin((alpha - beta)/2) sin(theta + (alpha - beta)/2).
/// `other_heading` selects the pi - arcsin solution instead of the arcsin one.
VelocitySample velocity_on_fdoa_manifold(const SensorPair& pair, const Vector2& position,
                                         double range_rate_difference, double speed, bool other_heading);

/// Smallest speed for which `range_rate_difference` is reachable at `position`.
double fdoa_speed_lower_bound(const SensorPair& pair, const Vector2& position, double range_rate_difference);

PositionSample sample_position_from_tdoa(const SensorPair& pair, double dt, const MeasurementModel& meas,
                                         const BirthConfig& cfg, Rng& rng);

VelocitySample sample_velocity_from_fdoa(const SensorPair& pair, const Vector2& position, double df,
                                         const MeasurementModel& meas, const BirthConfig& cfg, Rng& rng);

/// cfg.particles_per_measurement states conditioned on z. Weights are left to
/// the caller, which knows the total newborn count of the scan.
std::vector<BirthSample> sample_birth_particles(const SensorPair& pair, const PairMeasurement& z,
                                                const MeasurementModel& meas, const BirthConfig& cfg, Rng& rng);

/// Position uniform over `aoi`, heading uniform, speed uniform on [0, max_speed];
/// each weight is cfg.expected_births / count.
std::vector<WeightedParticle> sample_uniform_birth(const Rectangle& aoi, const BirthConfig& cfg, std::size_t count,
                                                   Rng& rng);

}  // namespace ptrack

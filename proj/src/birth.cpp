#include "ptrack/birth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptrack {

namespace {

constexpr double kSingularAngle = 1e-9;
constexpr double kPi = std::numbers::pi;

// 5 sigma beyond this the measured FDOA cannot be produced anywhere.
constexpr double kFeasibilitySigmas = 5.0;

}  // namespace

void BirthConfig::validate() const {
  if (!(max_range > 0.0)) throw std::invalid_argument("BirthConfig: max_range must be > 0");
  if (!(max_speed > 0.0)) throw std::invalid_argument("BirthConfig: max_speed must be > 0");
  if (particles_per_measurement < 1) throw std::invalid_argument("BirthConfig: particles_per_measurement must be >= 1");
  if (!(expected_births > 0.0)) throw std::invalid_argument("BirthConfig: expected_births must be > 0");
  if (max_retries < 1) throw std::invalid_argument("BirthConfig: max_retries must be >= 1");
}

PositionSample position_on_hyperbola(const SensorPair& pair, double range_difference, double first_range,
                                     bool upper_branch) {
  const double b = pair.baseline_length();
  const double dr = range_difference;
  const double r1 = first_range;
  const double cos_alpha = std::clamp((dr * dr - b * b - 2.0 * dr * r1) / (2.0 * b * r1), -1.0, 1.0);
  const double sin_alpha = std::sqrt(std::max(0.0, 1.0 - cos_alpha * cos_alpha));
  const double side = upper_branch ? 1.0 : -1.0;

  const Vector2 local(-r1 * cos_alpha, side * r1 * sin_alpha);
  PositionSample out;
  out.position = pair.from_baseline_frame(local);
  out.range_difference = dr;
  out.first_range = r1;
  out.alpha = std::acos(cos_alpha);
  out.upper_branch = upper_branch;
  return out;
}

double fdoa_speed_lower_bound(const SensorPair& pair, const Vector2& position, double range_rate_difference) {
  const auto angles = interior_angles(pair, position);
  const double half_apex = 0.5 * (angles.alpha - angles.beta);
  const double s = std::sin(half_apex);
  if (s < kSingularAngle) {
    return range_rate_difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(range_rate_difference) / (2.0 * s);
}

VelocitySample velocity_on_fdoa_manifold(const SensorPair& pair, const Vector2& position,
                                         double range_rate_difference, double speed, bool other_heading) {
  const auto angles = interior_angles(pair, position);
  const double half_apex = 0.5 * (angles.alpha - angles.beta);
  const double s = std::sin(half_apex);
  if (s < kSingularAngle) throw GeometryError("FDOA manifold undefined on the baseline extension");

  // Solved in the baseline frame reflected so the target lies on the left of
  // l1 -> l2; there the l2 -> target bearing is pi - beta.
  double phase = 0.0;
  if (speed > 0.0) {
    phase = std::asin(std::clamp(-range_rate_difference / (2.0 * speed * s), -1.0, 1.0));
  }
  if (other_heading) phase = kPi - phase;
  const double theta = phase - half_apex;
  const double heading = theta + kPi - angles.beta;

  const double side = pair.to_baseline_frame(position).y() < 0.0 ? -1.0 : 1.0;
  const Vector2 local(speed * std::cos(heading), side * speed * std::sin(heading));

  VelocitySample out;
  out.velocity = pair.rotate_from_baseline_frame(local);
  out.range_rate_difference = range_rate_difference;
  out.theta = theta;
  out.speed = speed;
  out.other_heading = other_heading;
  return out;
}

PositionSample sample_position_from_tdoa(const SensorPair& pair, double dt, const MeasurementModel& meas,
                                         const BirthConfig& cfg, Rng& rng) {
  const double b = pair.baseline_length();
  const double mean = meas.speed_of_light() * dt;
  const double sigma = meas.sigma_range_difference();
  std::normal_distribution<double> n01;

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const double dr = mean + sigma * n01(rng);
    const double r1_min = 0.5 * (dr + b);
    if (std::abs(dr) >= b || r1_min >= cfg.max_range) continue;

    const double r1 = std::uniform_real_distribution<double>(r1_min, cfg.max_range)(rng);
    const bool upper = std::bernoulli_distribution(0.5)(rng);
    return position_on_hyperbola(pair, dr, r1, upper);
  }
  throw BirthSamplingError("TDOA measurement inconsistent with the pair geometry");
}

VelocitySample sample_velocity_from_fdoa(const SensorPair& pair, const Vector2& position, double df,
                                         const MeasurementModel& meas, const BirthConfig& cfg, Rng& rng) {
  const double mean = meas.speed_of_light() * df / meas.carrier_hz();
  const double sigma = meas.sigma_range_rate_difference();
  const auto angles = interior_angles(pair, position);
  const double s = std::sin(0.5 * (angles.alpha - angles.beta));
  std::uniform_real_distribution<double> u01;

  if (s < kSingularAngle) {
    if (std::abs(mean) > kFeasibilitySigmas * sigma) {
      throw BirthSamplingError("nonzero FDOA on the baseline extension");
    }
    VelocitySample out;
    out.speed = cfg.max_speed * u01(rng);
    const double heading = 2.0 * kPi * u01(rng);
    out.velocity = out.speed * Vector2(std::cos(heading), std::sin(heading));
    out.theta = heading;
    out.fdoa_constrained = false;
    const TargetState x = make_state(position, out.velocity);
    out.range_rate_difference = range_rate(pair.first(), x) - range_rate(pair.second(), x);
    return out;
  }

  const double reach = 2.0 * s * cfg.max_speed;
  if (std::abs(mean) - kFeasibilitySigmas * sigma > reach) {
    throw BirthSamplingError("FDOA unreachable at this position within the speed limit");
  }

  std::normal_distribution<double> n01;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const double drdot = mean + sigma * n01(rng);
    const double lower = std::abs(drdot) / (2.0 * s);
    if (lower > cfg.max_speed) continue;
    const double speed = std::uniform_real_distribution<double>(lower, cfg.max_speed)(rng);
    const bool other = std::bernoulli_distribution(0.5)(rng);
    return velocity_on_fdoa_manifold(pair, position, drdot, speed, other);
  }
  throw BirthSamplingError("FDOA speed lower bound exceeds the speed limit");
}

std::vector<BirthSample> sample_birth_particles(const SensorPair& pair, const PairMeasurement& z,
                                                const MeasurementModel& meas, const BirthConfig& cfg, Rng& rng) {
  const double fdoa = std::abs(meas.speed_of_light() * z.df / meas.carrier_hz());
  if (fdoa - kFeasibilitySigmas * meas.sigma_range_rate_difference() > 2.0 * cfg.max_speed) {
    throw BirthSamplingError("FDOA exceeds any range-rate difference reachable within the speed limit");
  }

  std::vector<BirthSample> out;
  out.reserve(static_cast<std::size_t>(cfg.particles_per_measurement));
  for (int j = 0; j < cfg.particles_per_measurement; ++j) {
    bool accepted = false;
    for (int attempt = 0; attempt < cfg.max_retries && !accepted; ++attempt) {
      const PositionSample pos = sample_position_from_tdoa(pair, z.dt, meas, cfg, rng);
      try {
        const VelocitySample vel = sample_velocity_from_fdoa(pair, pos.position, z.df, meas, cfg, rng);
        out.push_back({make_state(pos.position, vel.velocity), pos, vel});
        accepted = true;
      } catch (const BirthSamplingError&) {
        // position cannot carry this FDOA; draw another one
      }
    }
    if (!accepted) throw BirthSamplingError("no birth state consistent with the measurement");
  }
  return out;
}

std::vector<WeightedParticle> sample_uniform_birth(const Rectangle& aoi, const BirthConfig& cfg, std::size_t count,
                                                   Rng& rng) {
  std::vector<WeightedParticle> out;
  if (count == 0) return out;
  out.reserve(count);
  std::uniform_real_distribution<double> ux(aoi.lower.x(), aoi.upper.x());
  std::uniform_real_distribution<double> uy(aoi.lower.y(), aoi.upper.y());
  std::uniform_real_distribution<double> uheading(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> uspeed(0.0, cfg.max_speed);
  const double w = cfg.expected_births / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vector2 p(ux(rng), uy(rng));
    const double heading = uheading(rng);
    const double speed = uspeed(rng);
    out.push_back({make_state(p, Vector2(speed * std::cos(heading), speed * std::sin(heading))), w});
  }
  return out;
}

}  // namespace ptrack

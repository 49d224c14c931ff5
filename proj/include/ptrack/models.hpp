#pragma once

#include "ptrack/geometry.hpp"
#include "ptrack/random.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ptrack {

using Matrix4 = Eigen::Matrix4d;

/// Constant-velocity motion with white-noise acceleration of intensity q:
/// F = I2 (x) [[1, T], [0, 1]], Q = I2 (x) q [[T^3/3, T^2/2], [T^2/2, T]].
class MotionModel {
 public:
  MotionModel(double sampling_interval, double noise_intensity, double survival_probability);

  double sampling_interval() const { return dt_; }
  double noise_intensity() const { return q_; }
  double survival_probability() const { return ps_; }
  double survival_probability(const TargetState&) const { return ps_; }

  const Matrix4& transition() const { return f_; }
  const Matrix4& process_noise() const { return cov_; }

  TargetState propagate(const TargetState& x, Rng& rng) const;
  TargetState propagate_mean(const TargetState& x) const { return f_ * x; }

  /// N(x; F x_prev, Q). Throws std::domain_error when q = 0.
  double transition_density(const TargetState& x, const TargetState& x_prev) const;

 private:
  double dt_;
  double q_;
  double ps_;
  Matrix4 f_;
  Matrix4 cov_;
  Matrix4 chol_;  // lower factor of cov_, zero when q = 0
  Matrix4 cov_inv_;
  double log_norm_ = 0.0;
};

/// Joint TDOA/FDOA Gaussian likelihood, R = diag(sigma_dt^2, sigma_df^2).
class MeasurementModel {
 public:
  MeasurementModel(double sigma_dt, double sigma_df, double detection_probability, double carrier_hz,
                   double c = kSpeedOfLight);

  double sigma_dt() const { return sigma_dt_; }
  double sigma_df() const { return sigma_df_; }
  double detection_probability() const { return pd_; }
  double detection_probability(const TargetState&) const { return pd_; }
  double carrier_hz() const { return fc_; }
  double speed_of_light() const { return c_; }

  /// Range-difference noise std (m) implied by sigma_dt.
  double sigma_range_difference() const { return c_ * sigma_dt_; }
  /// Range-rate-difference noise std (m/s) implied by sigma_df.
  double sigma_range_rate_difference() const { return c_ * sigma_df_ / fc_; }

  PairMeasurement predict(const SensorPair& pair, const TargetState& x) const {
    return predict_measurement(pair, x, fc_, c_);
  }

  double likelihood(const PairMeasurement& z, const SensorPair& pair, const TargetState& x) const;

  /// Likelihood given an already predicted measurement.
  double likelihood(const PairMeasurement& z, const PairMeasurement& predicted) const {
    const double a = (z.dt - predicted.dt) * inv_sigma_dt_;
    const double b = (z.df - predicted.df) * inv_sigma_df_;
    return peak_ * std::exp(-0.5 * (a * a + b * b));
  }

  double peak_density() const { return peak_; }

  PairMeasurement sample(const SensorPair& pair, const TargetState& x, Rng& rng) const;

 private:
  double sigma_dt_;
  double sigma_df_;
  double pd_;
  double fc_;
  double c_;
  double inv_sigma_dt_;
  double inv_sigma_df_;
  double peak_;
};

/// Poisson clutter uniform over [-dt_halfwidth, dt_halfwidth] x [-df_halfwidth, df_halfwidth].
class ClutterModel {
 public:
  ClutterModel(double mean_count, double dt_halfwidth, double df_halfwidth);

  /// Support [-B/c, B/c] in TDOA and [-2 v fc/c, 2 v fc/c] in FDOA.
  static ClutterModel for_pair(double mean_count, const SensorPair& pair, double max_speed, double carrier_hz,
                               double c = kSpeedOfLight);

  double mean_count() const { return lambda_; }
  double dt_halfwidth() const { return dt_half_; }
  double df_halfwidth() const { return df_half_; }

  bool in_support(const PairMeasurement& z) const {
    return std::abs(z.dt) <= dt_half_ && std::abs(z.df) <= df_half_;
  }

  /// kappa(z); integrates to mean_count over the support.
  double intensity(const PairMeasurement& z) const { return in_support(z) ? density_ : 0.0; }

  std::vector<PairMeasurement> sample(Rng& rng) const;

 private:
  double lambda_;
  double dt_half_;
  double df_half_;
  double density_;
};

}  // namespace ptrack

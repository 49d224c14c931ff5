#include "ptrack/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptrack {

namespace {

Matrix4 kron_identity(const Eigen::Matrix2d& block) {
  Matrix4 m = Matrix4::Zero();
  m.block<2, 2>(0, 0) = block;
  m.block<2, 2>(2, 2) = block;
  return m;
}

}  // namespace

MotionModel::MotionModel(double sampling_interval, double noise_intensity, double survival_probability)
    : dt_(sampling_interval), q_(noise_intensity), ps_(survival_probability) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("MotionModel: sampling interval must be > 0");
  if (!(q_ >= 0.0)) throw std::invalid_argument("MotionModel: noise intensity must be >= 0");
  if (!(ps_ >= 0.0 && ps_ <= 1.0)) throw std::invalid_argument("MotionModel: survival probability outside [0, 1]");

  Eigen::Matrix2d f;
  f << 1.0, dt_, 0.0, 1.0;
  Eigen::Matrix2d q;
  q << dt_ * dt_ * dt_ / 3.0, dt_ * dt_ / 2.0, dt_ * dt_ / 2.0, dt_;
  f_ = kron_identity(f);
  cov_ = kron_identity(q_ * q);

  chol_.setZero();
  cov_inv_.setZero();
  if (q_ > 0.0) {
    const Eigen::LLT<Matrix4> llt(cov_);
    chol_ = llt.matrixL();
    cov_inv_ = llt.solve(Matrix4::Identity());
    const double log_det = 2.0 * chol_.diagonal().array().log().sum();
    log_norm_ = -2.0 * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
  }
}

TargetState MotionModel::propagate(const TargetState& x, Rng& rng) const {
  TargetState out = f_ * x;
  if (q_ > 0.0) {
    std::normal_distribution<double> n01;
    const Eigen::Vector4d w(n01(rng), n01(rng), n01(rng), n01(rng));
    out += chol_.triangularView<Eigen::Lower>() * w;
  }
  return out;
}

double MotionModel::transition_density(const TargetState& x, const TargetState& x_prev) const {
  if (q_ <= 0.0) throw std::domain_error("transition density is degenerate for q = 0");
  const Eigen::Vector4d d = x - f_ * x_prev;
  return std::exp(log_norm_ - 0.5 * d.dot(cov_inv_ * d));
}

MeasurementModel::MeasurementModel(double sigma_dt, double sigma_df, double detection_probability,
                                   double carrier_hz, double c)
    : sigma_dt_(sigma_dt), sigma_df_(sigma_df), pd_(detection_probability), fc_(carrier_hz), c_(c) {
  if (!(sigma_dt_ > 0.0) || !(sigma_df_ > 0.0)) {
    throw std::invalid_argument("MeasurementModel: noise standard deviations must be > 0");
  }
  if (!(pd_ >= 0.0 && pd_ <= 1.0)) throw std::invalid_argument("MeasurementModel: detection probability outside [0, 1]");
  if (!(fc_ > 0.0)) throw std::invalid_argument("MeasurementModel: carrier frequency must be > 0");
  if (!(c_ > 0.0)) throw std::invalid_argument("MeasurementModel: propagation speed must be > 0");
  inv_sigma_dt_ = 1.0 / sigma_dt_;
  inv_sigma_df_ = 1.0 / sigma_df_;
  peak_ = 1.0 / (2.0 * std::numbers::pi * sigma_dt_ * sigma_df_);
}

double MeasurementModel::likelihood(const PairMeasurement& z, const SensorPair& pair, const TargetState& x) const {
  const double g = likelihood(z, predict(pair, x));
  if (!std::isfinite(g)) throw std::domain_error("non-finite measurement likelihood");
  return g;
}

PairMeasurement MeasurementModel::sample(const SensorPair& pair, const TargetState& x, Rng& rng) const {
  std::normal_distribution<double> n01;
  PairMeasurement z = predict(pair, x);
  z.dt += sigma_dt_ * n01(rng);
  z.df += sigma_df_ * n01(rng);
  return z;
}

ClutterModel::ClutterModel(double mean_count, double dt_halfwidth, double df_halfwidth)
    : lambda_(mean_count), dt_half_(dt_halfwidth), df_half_(df_halfwidth) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("ClutterModel: mean count must be >= 0");
  if (!(dt_half_ > 0.0) || !(df_half_ > 0.0)) throw std::invalid_argument("ClutterModel: half-widths must be > 0");
  density_ = lambda_ / (4.0 * dt_half_ * df_half_);
}

ClutterModel ClutterModel::for_pair(double mean_count, const SensorPair& pair, double max_speed, double carrier_hz,
                                    double c) {
  return {mean_count, pair.baseline_length() / c, 2.0 * max_speed * carrier_hz / c};
}

std::vector<PairMeasurement> ClutterModel::sample(Rng& rng) const {
  std::vector<PairMeasurement> out;
  if (lambda_ <= 0.0) return out;
  std::poisson_distribution<int> count(lambda_);
  std::uniform_real_distribution<double> udt(-dt_half_, dt_half_);
  std::uniform_real_distribution<double> udf(-df_half_, df_half_);
  const int n = count(rng);
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double dt = udt(rng);
    const double df = udf(rng);
    out.push_back({dt, df});
  }
  return out;
}

}  // namespace ptrack

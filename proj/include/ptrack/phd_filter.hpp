#pragma once

#include "ptrack/birth.hpp"
#include "ptrack/geometry.hpp"
#include "ptrack/models.hpp"
#include "ptrack/particles.hpp"
#include "ptrack/random.hpp"

#include <vector>

namespace ptrack {

/// adaptive: newborn particles sampled from each pair's measurements.
/// uniform: a fixed number of newborn particles spread over the area of
/// interest once per scan, updated like persistent ones.
enum class BirthMode { adaptive, uniform };

enum class SensorOrder { fixed, shuffled };

struct FilterConfig {
  int particles_per_target = 500;
  BirthConfig birth;
  BirthMode birth_mode = BirthMode::adaptive;
  Rectangle area_of_interest;
  std::size_t uniform_birth_count = 15000;
  double uniform_birth_mass = 0.1;
  SensorOrder sensor_order = SensorOrder::fixed;
  double extraction_threshold = 0.5;
  double merge_radius = 20.0;
  /// Persistent mass below which resampling returns an empty system.
  double mass_floor = 1e-6;

  void validate() const;
};

/// One ordered sensor pair together with its clutter model.
struct SensorChannel {
  SensorPair pair;
  ClutterModel clutter;
};

struct FilterModels {
  MotionModel motion;
  MeasurementModel measurement;
  std::vector<SensorChannel> channels;
};

using MeasurementSet = std::vector<PairMeasurement>;

/// One measurement set per channel, in channel order.
using Scan = std::vector<MeasurementSet>;

struct FilterState {
  ParticleSystem persistent;  // after resampling
  ParticleSystem newborn{{}, ParticleKind::newborn};  // from the last update of the scan
  double persistent_mass = 0.0;  // before resampling
  double newborn_mass = 0.0;     // updated newborn mass summed over the pairs of the scan
  std::vector<TargetState> estimates;
};

ParticleSystem predict(const FilterState& state, const MotionModel& motion, Rng& rng);

/// In-place single-pair update of the predicted persistent and newborn weights:
///   w_p <- (1 - pd) w_p + sum_z pd g(z|x_p) w_p / L(z)
///   w_b <- sum_z w_b / L(z)
///   L(z) = kappa(z) + sum_b w_b + sum_p pd g(z|x_p) w_p.
/// Newborn weights must already be set.
void update_single_sensor(ParticleSystem& persistent, ParticleSystem& newborn, const MeasurementSet& measurements,
                          const SensorPair& pair, const MeasurementModel& meas, const ClutterModel& clutter);

/// Systematic resampling to max(1, round(M_p * mass)) equally weighted
/// particles of the same total mass; empty below the mass floor.
ParticleSystem resample(const ParticleSystem& persistent, int particles_per_target, Rng& rng,
                        double mass_floor = 1e-6);

inline double estimate_cardinality(const ParticleSystem& persistent) { return persistent.mass(); }

/// Measurement-driven extraction from the persistent system as it stood
/// before the update with `measurements`. Each z whose association mass
///   W_z = sum_i pd g(z|x_i) w_i / L(z)
/// exceeds the threshold yields the mean of the particles weighted by
/// pd g(z|x_i) w_i. Estimates closer than the merge radius are fused.
std::vector<TargetState> extract_states(const ParticleSystem& persistent, double newborn_mass,
                                        const MeasurementSet& measurements, const SensorPair& pair,
                                        const MeasurementModel& meas, const ClutterModel& clutter,
                                        const FilterConfig& cfg);

/// One full time step: predict, per-pair birth sampling and update in the
/// configured order with newborn particles promoted between pairs, state
/// extraction on the last pair, then resampling of the persistent system.
FilterState iterated_corrector_scan(const FilterState& previous, const Scan& scan, const FilterModels& models,
                                    const FilterConfig& cfg, Rng& rng);

}  // namespace ptrack

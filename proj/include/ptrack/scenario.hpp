#pragma once

#include "ptrack/geometry.hpp"
#include "ptrack/models.hpp"
#include "ptrack/particles.hpp"
#include "ptrack/phd_filter.hpp"
#include "ptrack/random.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ptrack {

/// Model parameters shared by the simulator and the filter.
struct ModelParams {
  double sampling_interval = 1.0;  // s
  double noise_intensity = 0.3;    // m^2/s^3
  double survival_probability = 0.98;
  double sigma_dt = 20e-9;  // s
  double sigma_df = 2.5;    // Hz
  double detection_probability = 0.99;
  double carrier_hz = 2.4e9;
  double speed_of_light = kSpeedOfLight;
  double clutter_rate = 2.0;        // per pair per scan
  double clutter_max_speed = 25.0;  // sets the FDOA clutter support, m/s
};

struct TargetSpec {
  TargetState initial = TargetState::Zero();  // state at birth_step
  int birth_step = 0;
  int death_step = 0;  // first step the target is absent
};

struct Scenario {
  std::string name;
  Rectangle area_of_interest;
  std::vector<SensorPose> sensors;
  std::vector<std::pair<int, int>> pairs;
  std::vector<TargetSpec> targets;
  int steps = 0;
  ModelParams models;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  SensorPair sensor_pair(std::size_t index) const;
  MotionModel motion_model() const;
  MeasurementModel measurement_model() const;
  FilterModels filter_models() const;
};

/// Four sensors near the corners of a 2 km x 2 km area, all six pairs, three
/// 15 m/s targets with staggered births (0, 10, 20) and deaths (80, 90, 100)
/// over 100 steps.
Scenario paper_fig2_scenario();

struct TruthTarget {
  int id = 0;
  TargetState state = TargetState::Zero();
};

using TruthStep = std::vector<TruthTarget>;

/// Noiseless constant-velocity truth for every step.
std::vector<TruthStep> generate_truth(const Scenario& scenario);

struct ScanMeasurements {
  int step = 0;
  Scan sets;  // filter-facing, one shuffled set per pair
  /// Parallel to `sets`: source target id of each measurement, -1 for clutter.
  std::vector<std::vector<int>> labels;
};

ScanMeasurements generate_measurements(const TruthStep& truth, int step, const Scenario& scenario, Rng& rng);

std::vector<TargetState> states_of(const TruthStep& truth);

}  // namespace ptrack

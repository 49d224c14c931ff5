#include "ptrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptrack {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw std::invalid_argument("scenario." + field + ": " + why);
}

TargetState heading_state(double x, double y, double speed, double heading_deg) {
  const double h = heading_deg * std::numbers::pi / 180.0;
  return make_state(Vector2(x, y), Vector2(speed * std::cos(h), speed * std::sin(h)));
}

}  // namespace

void Scenario::validate() const {
  if (!(area_of_interest.upper.array() > area_of_interest.lower.array()).all()) {
    invalid("area_of_interest", "upper corner must exceed lower corner");
  }
  if (steps < 1) invalid("steps", "must be >= 1");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (!sensors[i].position.allFinite()) invalid("sensors[" + std::to_string(i) + "]", "non-finite position");
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    const auto n = static_cast<int>(sensors.size());
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      invalid("pairs[" + std::to_string(k) + "]", "invalid sensor indices");
    }
    if ((sensors[a].position - sensors[b].position).norm() <= 0.0) {
      invalid("pairs[" + std::to_string(k) + "]", "coincident sensors");
    }
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& target = targets[t];
    const std::string field = "targets[" + std::to_string(t) + "]";
    if (!target.initial.allFinite()) invalid(field + ".initial", "non-finite state");
    if (!(target.birth_step >= 0 && target.birth_step < target.death_step && target.death_step <= steps)) {
      invalid(field, "requires 0 <= birth_step < death_step <= steps");
    }
    if (!area_of_interest.contains(position_of(target.initial))) {
      invalid(field + ".initial", "position outside the area of interest");
    }
  }
  // constructors re-check the model parameters
  (void)motion_model();
  (void)measurement_model();
  if (!(models.clutter_rate >= 0.0)) invalid("models.clutter_rate", "must be >= 0");
  if (!(models.clutter_max_speed > 0.0)) invalid("models.clutter_max_speed", "must be > 0");
}

SensorPair Scenario::sensor_pair(std::size_t index) const {
  const auto [a, b] = pairs.at(index);
  return {sensors.at(static_cast<std::size_t>(a)), sensors.at(static_cast<std::size_t>(b))};
}

MotionModel Scenario::motion_model() const {
  return {models.sampling_interval, models.noise_intensity, models.survival_probability};
}

MeasurementModel Scenario::measurement_model() const {
  return {models.sigma_dt, models.sigma_df, models.detection_probability, models.carrier_hz, models.speed_of_light};
}

FilterModels Scenario::filter_models() const {
  FilterModels out{motion_model(), measurement_model(), {}};
  out.channels.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const SensorPair pair = sensor_pair(k);
    out.channels.push_back({pair, ClutterModel::for_pair(models.clutter_rate, pair, models.clutter_max_speed,
                                                         models.carrier_hz, models.speed_of_light)});
  }
  return out;
}

Scenario paper_fig2_scenario() {
  Scenario s;
  s.name = "paper_fig2";
  s.area_of_interest = {Vector2(0.0, 0.0), Vector2(2000.0, 2000.0)};
  s.sensors = {{Vector2(250.0, 250.0)}, {Vector2(1750.0, 250.0)}, {Vector2(1750.0, 1750.0)}, {Vector2(250.0, 1750.0)}};
  s.pairs = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  s.targets = {
      {heading_state(400.0, 700.0, 15.0, 20.0), 0, 80},
      {heading_state(1500.0, 400.0, 15.0, 110.0), 10, 90},
      {heading_state(1600.0, 1500.0, 15.0, 225.0), 20, 100},
  };
  s.steps = 100;
  return s;
}

std::vector<TruthStep> generate_truth(const Scenario& scenario) {
  const MotionModel cv(scenario.models.sampling_interval, 0.0, 1.0);
  std::vector<TruthStep> out(static_cast<std::size_t>(scenario.steps));
  for (std::size_t t = 0; t < scenario.targets.size(); ++t) {
    const auto& target = scenario.targets[t];
    TargetState x = target.initial;
    for (int k = target.birth_step; k < target.death_step; ++k) {
      out[static_cast<std::size_t>(k)].push_back({static_cast<int>(t), x});
      x = cv.propagate_mean(x);
    }
  }
  return out;
}

ScanMeasurements generate_measurements(const TruthStep& truth, int step, const Scenario& scenario, Rng& rng) {
  const MeasurementModel meas = scenario.measurement_model();
  ScanMeasurements out;
  out.step = step;
  out.sets.resize(scenario.pairs.size());
  out.labels.resize(scenario.pairs.size());

  for (std::size_t k = 0; k < scenario.pairs.size(); ++k) {
    const SensorPair pair = scenario.sensor_pair(k);
    const ClutterModel clutter = ClutterModel::for_pair(scenario.models.clutter_rate, pair,
                                                        scenario.models.clutter_max_speed, scenario.models.carrier_hz,
                                                        scenario.models.speed_of_light);
    std::vector<std::pair<PairMeasurement, int>> tagged;
    for (const auto& target : truth) {
      if (std::bernoulli_distribution(meas.detection_probability(target.state))(rng)) {
        tagged.emplace_back(meas.sample(pair, target.state, rng), target.id);
      }
    }
    for (const auto& z : clutter.sample(rng)) tagged.emplace_back(z, -1);
    std::shuffle(tagged.begin(), tagged.end(), rng);

    for (const auto& [z, label] : tagged) {
      out.sets[k].push_back(z);
      out.labels[k].push_back(label);
    }
  }
  return out;
}

std::vector<TargetState> states_of(const TruthStep& truth) {
  std::vector<TargetState> out;
  out.reserve(truth.size());
  for (const auto& t : truth) out.push_back(t.state);
  return out;
}

}  // namespace ptrack

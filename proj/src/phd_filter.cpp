#include "ptrack/phd_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ptrack {

namespace {

constexpr double kNormalizerFloor = 1e-30;

// Likelihoods g(z_j | x_i) laid out row-major by particle; a particle sitting
// on a sensor has no defined range rate and gets zero likelihood.
std::vector<double> likelihood_table(const ParticleSystem& particles, const MeasurementSet& measurements,
                                     const SensorPair& pair, const MeasurementModel& meas) {
  const std::size_t m = measurements.size();
  std::vector<double> g(particles.size() * m, 0.0);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    PairMeasurement h;
    try {
      h = meas.predict(pair, particles.particles[i].state);
    } catch (const GeometryError&) {
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) g[i * m + j] = meas.likelihood(measurements[j], h);
  }
  return g;
}

std::vector<double> normalizers(const ParticleSystem& persistent, double newborn_mass,
                                const MeasurementSet& measurements, const std::vector<double>& g,
                                const MeasurementModel& meas, const ClutterModel& clutter) {
  const std::size_t m = measurements.size();
  std::vector<double> l(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) l[j] = clutter.intensity(measurements[j]) + newborn_mass;
  for (std::size_t i = 0; i < persistent.size(); ++i) {
    const auto& p = persistent.particles[i];
    const double pdw = meas.detection_probability(p.state) * p.weight;
    for (std::size_t j = 0; j < m; ++j) l[j] += pdw * g[i * m + j];
  }
  for (double& v : l) v = std::max(v, kNormalizerFloor);
  return l;
}

}  // namespace

void FilterConfig::validate() const {
  if (particles_per_target < 1) throw std::invalid_argument("FilterConfig: particles_per_target must be >= 1");
  birth.validate();
  if (!(extraction_threshold > 0.0 && extraction_threshold < 1.0)) {
    throw std::invalid_argument("FilterConfig: extraction_threshold must lie in (0, 1)");
  }
  if (!(merge_radius >= 0.0)) throw std::invalid_argument("FilterConfig: merge_radius must be >= 0");
  if (!(mass_floor >= 0.0)) throw std::invalid_argument("FilterConfig: mass_floor must be >= 0");
  if (birth_mode == BirthMode::uniform) {
    if (!(uniform_birth_mass > 0.0)) throw std::invalid_argument("FilterConfig: uniform_birth_mass must be > 0");
    if (!((area_of_interest.upper.array() > area_of_interest.lower.array()).all())) {
      throw std::invalid_argument("FilterConfig: area_of_interest is empty");
    }
  }
}

ParticleSystem predict(const FilterState& state, const MotionModel& motion, Rng& rng) {
  ParticleSystem out;
  out.kind = ParticleKind::persistent;
  out.particles.reserve(state.persistent.size() + state.newborn.size());
  // Bootstrap proposal: the importance density equals the transition density,
  // so the weight ratio reduces to the survival probability.
  auto push = [&](const WeightedParticle& p) {
    const TargetState x = motion.propagate(p.state, rng);
    out.particles.push_back({x, motion.survival_probability(x) * p.weight});
  };
  for (const auto& p : state.persistent.particles) push(p);
  for (const auto& p : state.newborn.particles) push(p);
  return out;
}

void update_single_sensor(ParticleSystem& persistent, ParticleSystem& newborn, const MeasurementSet& measurements,
                          const SensorPair& pair, const MeasurementModel& meas, const ClutterModel& clutter) {
  const std::size_t m = measurements.size();
  if (m == 0) {
    for (auto& p : persistent.particles) p.weight *= 1.0 - meas.detection_probability(p.state);
    for (auto& p : newborn.particles) p.weight = 0.0;
    return;
  }

  const std::vector<double> g = likelihood_table(persistent, measurements, pair, meas);
  const std::vector<double> l = normalizers(persistent, newborn.mass(), measurements, g, meas, clutter);

  for (std::size_t i = 0; i < persistent.size(); ++i) {
    auto& p = persistent.particles[i];
    const double pd = meas.detection_probability(p.state);
    double ratio = 0.0;
    for (std::size_t j = 0; j < m; ++j) ratio += g[i * m + j] / l[j];
    p.weight = (1.0 - pd) * p.weight + pd * p.weight * ratio;
    if (!std::isfinite(p.weight)) throw std::domain_error("non-finite persistent weight after update");
  }

  double inverse_sum = 0.0;
  for (double v : l) inverse_sum += 1.0 / v;
  for (auto& p : newborn.particles) {
    p.weight *= inverse_sum;
    if (!std::isfinite(p.weight)) throw std::domain_error("non-finite newborn weight after update");
  }
}

ParticleSystem resample(const ParticleSystem& persistent, int particles_per_target, Rng& rng, double mass_floor) {
  ParticleSystem out;
  out.kind = ParticleKind::persistent;
  const double mass = persistent.mass();
  if (!(mass > mass_floor) || persistent.empty()) return out;

  const auto count = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(particles_per_target) * mass)));
  const double weight = mass / static_cast<double>(count);
  out.particles.reserve(count);

  const double step = mass / static_cast<double>(count);
  double pointer = std::uniform_real_distribution<double>(0.0, step)(rng);
  double cumulative = persistent.particles.front().weight;
  std::size_t i = 0;
  for (std::size_t k = 0; k < count; ++k) {
    while (cumulative < pointer && i + 1 < persistent.size()) {
      ++i;
      cumulative += persistent.particles[i].weight;
    }
    out.particles.push_back({persistent.particles[i].state, weight});
    pointer += step;
  }
  return out;
}

std::vector<TargetState> extract_states(const ParticleSystem& persistent, double newborn_mass,
                                        const MeasurementSet& measurements, const SensorPair& pair,
                                        const MeasurementModel& meas, const ClutterModel& clutter,
                                        const FilterConfig& cfg) {
  struct Candidate {
    TargetState mean;
    double mass;
  };
  const std::size_t m = measurements.size();
  if (m == 0 || persistent.empty()) return {};

  const std::vector<double> g = likelihood_table(persistent, measurements, pair, meas);
  const std::vector<double> l = normalizers(persistent, newborn_mass, measurements, g, meas, clutter);

  std::vector<Candidate> candidates;
  for (std::size_t j = 0; j < m; ++j) {
    TargetState sum = TargetState::Zero();
    double total = 0.0;
    for (std::size_t i = 0; i < persistent.size(); ++i) {
      const auto& p = persistent.particles[i];
      const double a = meas.detection_probability(p.state) * g[i * m + j] * p.weight;
      sum += a * p.state;
      total += a;
    }
    const double existence = total / l[j];
    if (existence > cfg.extraction_threshold && total > 0.0) candidates.push_back({sum / total, existence});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.mass > b.mass; });
  std::vector<Candidate> merged;
  for (const auto& c : candidates) {
    auto near = std::find_if(merged.begin(), merged.end(), [&](const Candidate& e) {
      return (position_of(e.mean) - position_of(c.mean)).norm() < cfg.merge_radius;
    });
    if (near == merged.end()) {
      merged.push_back(c);
    } else {
      const double total = near->mass + c.mass;
      near->mean = (near->mass * near->mean + c.mass * c.mean) / total;
      near->mass = total;
    }
  }

  std::vector<TargetState> out;
  out.reserve(merged.size());
  for (const auto& c : merged) out.push_back(c.mean);
  return out;
}

FilterState iterated_corrector_scan(const FilterState& previous, const Scan& scan, const FilterModels& models,
                                    const FilterConfig& cfg, Rng& rng) {
  if (scan.size() != models.channels.size()) {
    throw std::invalid_argument("scan has " + std::to_string(scan.size()) + " measurement sets for " +
                                std::to_string(models.channels.size()) + " sensor pairs");
  }

  FilterState next;
  ParticleSystem persistent = predict(previous, models.motion, rng);

  if (cfg.birth_mode == BirthMode::uniform) {
    BirthConfig births = cfg.birth;
    births.expected_births = cfg.uniform_birth_mass;
    auto particles = sample_uniform_birth(cfg.area_of_interest, births, cfg.uniform_birth_count, rng);
    persistent.particles.insert(persistent.particles.end(), particles.begin(), particles.end());
  }

  std::vector<std::size_t> order(models.channels.size());
  for (std::size_t l = 0; l < order.size(); ++l) order[l] = l;
  if (cfg.sensor_order == SensorOrder::shuffled) std::shuffle(order.begin(), order.end(), rng);

  for (std::size_t step = 0; step < order.size(); ++step) {
    const SensorChannel& channel = models.channels[order[step]];
    const MeasurementSet& z = scan[order[step]];
    const bool last = step + 1 == order.size();

    ParticleSystem newborn{{}, ParticleKind::newborn};
    if (cfg.birth_mode == BirthMode::adaptive) {
      std::size_t sources = 0;
      for (const auto& measurement : z) {
        try {
          auto samples = sample_birth_particles(channel.pair, measurement, models.measurement, cfg.birth, rng);
          for (const auto& s : samples) newborn.particles.push_back({s.state, 0.0});
          ++sources;
        } catch (const BirthSamplingError&) {
          // still used in the update, just contributes no births
        }
      }
      if (sources > 0) {
        const double w = cfg.birth.expected_births / static_cast<double>(newborn.size());
        for (auto& p : newborn.particles) p.weight = w;
      }
    }

    if (last) {
      next.estimates = extract_states(persistent, newborn.mass(), z, channel.pair, models.measurement,
                                      channel.clutter, cfg);
    }

    update_single_sensor(persistent, newborn, z, channel.pair, models.measurement, channel.clutter);
    next.newborn_mass += newborn.mass();

    if (last) {
      next.newborn = std::move(newborn);
    } else {
      persistent.particles.insert(persistent.particles.end(), newborn.particles.begin(), newborn.particles.end());
    }
  }

  next.persistent_mass = persistent.mass();
  next.persistent = resample(persistent, cfg.particles_per_target, rng, cfg.mass_floor);
  return next;
}

}  // namespace ptrack

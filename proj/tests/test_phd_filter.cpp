#include <gtest/gtest.h>

#include "ptrack/phd_filter.hpp"
#include "ptrack/scenario.hpp"

#include <cmath>
#include <numbers>

using namespace ptrack;

namespace {

constexpr double kPi = std::numbers::pi;

TargetState state(double px, double vx, double py, double vy) {
  TargetState s;
  s << px, vx, py, vy;
  return s;
}

SensorPair paper_pair() { return {SensorPose{{250.0, 250.0}}, SensorPose{{1750.0, 250.0}}}; }

ParticleSystem cloud(const TargetState& centre, std::size_t n, double mass, double spread, Rng& rng) {
  std::normal_distribution<double> n01;
  ParticleSystem out;
  for (std::size_t i = 0; i < n; ++i) {
    TargetState x = centre;
    x(0) += spread * n01(rng);
    x(2) += spread * n01(rng);
    x(1) += 0.1 * spread * n01(rng);
    x(3) += 0.1 * spread * n01(rng);
    out.particles.push_back({x, mass / static_cast<double>(n)});
  }
  return out;
}

// Gaussian TDOA/FDOA likelihood written out from the range definitions.
double oracle_likelihood(const PairMeasurement& z, const SensorPair& pair, const TargetState& x, double sdt,
                         double sdf, double fc) {
  const Vector2 p(x(0), x(2));
  const Vector2 v(x(1), x(3));
  const Vector2 a = p - pair.first().position;
  const Vector2 b = p - pair.second().position;
  const double dt = (a.norm() - b.norm()) / kSpeedOfLight;
  const double df = fc / kSpeedOfLight * (a.dot(v) / a.norm() - b.dot(v) / b.norm());
  const double u = (z.dt - dt) / sdt;
  const double w = (z.df - df) / sdf;
  return std::exp(-0.5 * (u * u + w * w)) / (2.0 * kPi * sdt * sdf);
}

FilterModels single_pair_models(double pd, double clutter_rate) {
  const SensorPair pair = paper_pair();
  return {MotionModel(1.0, 0.3, 0.98), MeasurementModel(20e-9, 2.5, pd, 2.4e9),
          {{pair, ClutterModel::for_pair(clutter_rate, pair, 25.0, 2.4e9)}}};
}

}  // namespace

TEST(Predict, SurvivalScalesMass) {
  Rng rng(1);
  FilterState s;
  s.persistent = cloud(state(1000, 1, 1000, 1), 300, 3.0, 10.0, rng);
  EXPECT_NEAR(predict(s, MotionModel(1.0, 0.3, 0.98), rng).mass(), 2.94, 1e-12);
  EXPECT_NEAR(predict(s, MotionModel(1.0, 0.3, 1.0), rng).mass(), 3.0, 1e-12);
}

TEST(Predict, IncludesNewbornParticles) {
  Rng rng(2);
  FilterState s;
  s.persistent = cloud(state(1000, 1, 1000, 1), 10, 1.0, 10.0, rng);
  s.newborn = cloud(state(500, 1, 500, 1), 5, 0.5, 10.0, rng);
  const ParticleSystem p = predict(s, MotionModel(1.0, 0.3, 1.0), rng);
  EXPECT_EQ(p.size(), 15u);
  EXPECT_EQ(p.kind, ParticleKind::persistent);
  EXPECT_NEAR(p.mass(), 1.5, 1e-12);
}

TEST(Predict, EmptyStaysEmpty) {
  Rng rng(3);
  EXPECT_TRUE(predict(FilterState{}, MotionModel(1.0, 0.3, 0.98), rng).empty());
}

TEST(Update, NoMeasurementsScalesByMissProbability) {
  Rng rng(4);
  const auto models = single_pair_models(0.99, 2.0);
  ParticleSystem p = cloud(state(1000, 1, 1000, 1), 200, 1.7, 10.0, rng);
  ParticleSystem b{{}, ParticleKind::newborn};
  update_single_sensor(p, b, {}, models.channels[0].pair, models.measurement, models.channels[0].clutter);
  EXPECT_NEAR(p.mass(), 1.7 * 0.01, 1e-14);
}

TEST(Update, NoDetectionLeavesWeightsUnchanged) {
  Rng rng(5);
  const auto models = single_pair_models(0.0, 2.0);
  const TargetState x = state(1000, 1, 1000, 1);
  ParticleSystem p = cloud(x, 50, 1.0, 10.0, rng);
  const ParticleSystem before = p;
  ParticleSystem b{{}, ParticleKind::newborn};
  update_single_sensor(p, b, {models.measurement.predict(paper_pair(), x)}, paper_pair(), models.measurement,
                       models.channels[0].clutter);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_DOUBLE_EQ(p.particles[i].weight, before.particles[i].weight);
}

TEST(Update, HandInstance) {
  const double pd = 0.9;
  const double sdt = 20e-9, sdf = 2.5, fc = 2.4e9;
  const MeasurementModel meas(sdt, sdf, pd, fc);
  const SensorPair pair = paper_pair();
  const ClutterModel clutter(2.0, 5e-6, 400.0);
  const double kappa = 2.0 / (4.0 * 5e-6 * 400.0);

  const TargetState xs[3] = {state(900, 3, 1100, -2), state(905, 3, 1098, -2), state(1300, -5, 700, 4)};
  const double w[3] = {0.2, 0.3, 0.5};
  const double wb = 0.01;
  ParticleSystem persistent;
  for (int i = 0; i < 3; ++i) persistent.particles.push_back({xs[i], w[i]});
  ParticleSystem newborn{{{state(600, 0, 600, 0), wb}}, ParticleKind::newborn};

  // one measurement near particles 0/1, one clutter-like
  PairMeasurement z0 = meas.predict(pair, xs[0]);
  z0.dt += 5e-9;
  z0.df -= 1.0;
  const PairMeasurement z1{1.0e-6, 100.0};
  const MeasurementSet zs{z0, z1};

  double g[3][2], l[2];
  for (int j = 0; j < 2; ++j) {
    l[j] = kappa + wb;
    for (int i = 0; i < 3; ++i) {
      g[i][j] = oracle_likelihood(zs[j], pair, xs[i], sdt, sdf, fc);
      l[j] += pd * g[i][j] * w[i];
    }
  }
  double expected[3];
  for (int i = 0; i < 3; ++i) {
    expected[i] = (1.0 - pd) * w[i];
    for (int j = 0; j < 2; ++j) expected[i] += pd * g[i][j] * w[i] / l[j];
  }
  const double expected_newborn = wb * (1.0 / l[0] + 1.0 / l[1]);

  update_single_sensor(persistent, newborn, zs, pair, meas, clutter);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(persistent.particles[i].weight, expected[i], 1e-12 * expected[i]) << i;
  EXPECT_NEAR(newborn.particles[0].weight, expected_newborn, 1e-12 * expected_newborn);
}

TEST(Update, ParticleOnSensorGetsZeroLikelihood) {
  const auto models = single_pair_models(0.99, 2.0);
  ParticleSystem p{{{state(250, 1, 250, 1), 1.0}}, ParticleKind::persistent};
  ParticleSystem b{{}, ParticleKind::newborn};
  update_single_sensor(p, b, {{0.0, 0.0}}, paper_pair(), models.measurement, models.channels[0].clutter);
  EXPECT_NEAR(p.particles[0].weight, 0.01, 1e-15);
}

TEST(Resample, CountFollowsMass) {
  Rng rng(6);
  ParticleSystem p = cloud(state(1000, 1, 1000, 1), 731, 2.37, 10.0, rng);
  const ParticleSystem r = resample(p, 500, rng);
  ASSERT_EQ(r.size(), 1185u);
  for (const auto& q : r.particles) EXPECT_NEAR(q.weight, 0.002, 1e-15);
  EXPECT_NEAR(r.mass(), 2.37, 1e-12);
}

TEST(Resample, SingleParticle) {
  Rng rng(7);
  const TargetState x = state(1, 2, 3, 4);
  const ParticleSystem r = resample(ParticleSystem{{{x, 1.0}}, ParticleKind::persistent}, 500, rng);
  ASSERT_EQ(r.size(), 500u);
  for (const auto& q : r.particles) {
    EXPECT_EQ(q.state, x);
    EXPECT_DOUBLE_EQ(q.weight, 1.0 / 500.0);
  }
}

TEST(Resample, AtLeastOneParticleAboveFloor) {
  Rng rng(8);
  const ParticleSystem r = resample(ParticleSystem{{{state(0, 0, 0, 0), 1e-4}}, ParticleKind::persistent}, 500, rng);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r.particles[0].weight, 1e-4);
}

TEST(Resample, EmptyBelowFloor) {
  Rng rng(9);
  EXPECT_TRUE(resample(ParticleSystem{{{state(0, 0, 0, 0), 1e-7}}, ParticleKind::persistent}, 500, rng).empty());
  EXPECT_TRUE(resample(ParticleSystem{}, 500, rng).empty());
}

TEST(Resample, OffspringCountsAreUnbiased) {
  // chi-square against the expected offspring counts N w_i / mass
  Rng rng(10);
  const double w[10] = {0.02, 0.05, 0.08, 0.1, 0.15, 0.03, 0.2, 0.12, 0.07, 0.18};
  ParticleSystem p;
  for (int i = 0; i < 10; ++i) p.particles.push_back({state(i, 0, 0, 0), w[i]});
  constexpr int trials = 10000;
  double counts[10] = {};
  for (int t = 0; t < trials; ++t) {
    for (const auto& q : resample(p, 10, rng).particles) counts[static_cast<int>(q.state(0))] += 1.0;
  }
  double chi2 = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double e = trials * 10.0 * w[i];
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, 21.67);  // 99th percentile, 9 dof
}

TEST(Resample, ConservesMassAcrossSystems) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ParticleSystem p;
    const int n = 1 + static_cast<int>(u(rng) * 300);
    for (int i = 0; i < n; ++i) p.particles.push_back({state(i, 0, 0, 0), u(rng) * 0.01});
    const double mass = p.mass();
    EXPECT_NEAR(resample(p, 500, rng).mass(), mass, 1e-12 * mass);
  }
}

TEST(Cardinality, IsPersistentMass) {
  Rng rng(12);
  EXPECT_NEAR(estimate_cardinality(cloud(state(0, 0, 0, 0), 100, 2.5, 1.0, rng)), 2.5, 1e-12);
}

TEST(Extraction, NothingWithoutMeasurementsOrParticles) {
  Rng rng(13);
  const auto models = single_pair_models(0.99, 2.0);
  const FilterConfig cfg;
  const ParticleSystem p = cloud(state(1000, 1, 1000, 1), 100, 1.0, 5.0, rng);
  EXPECT_TRUE(extract_states(p, 0.0, {}, paper_pair(), models.measurement, models.channels[0].clutter, cfg).empty());
  EXPECT_TRUE(extract_states(ParticleSystem{}, 0.0, {{0.0, 0.0}}, paper_pair(), models.measurement,
                             models.channels[0].clutter, cfg)
                  .empty());
}

TEST(Extraction, TightCloudYieldsItsMean) {
  Rng rng(14);
  const auto models = single_pair_models(0.99, 2.0);
  const TargetState x = state(1000, 5, 1200, -3);
  const ParticleSystem p = cloud(x, 500, 1.0, 2.0, rng);
  const auto est = extract_states(p, 1e-4, {models.measurement.predict(paper_pair(), x)}, paper_pair(),
                                  models.measurement, models.channels[0].clutter, FilterConfig{});
  ASSERT_EQ(est.size(), 1u);
  EXPECT_LT((position_of(est[0]) - position_of(x)).norm(), 2.0);
}

TEST(Extraction, ClutterMeasurementIsIgnored) {
  Rng rng(15);
  const auto models = single_pair_models(0.99, 2.0);
  const TargetState x = state(1000, 5, 1200, -3);
  const ParticleSystem p = cloud(x, 500, 1.0, 2.0, rng);
  const MeasurementSet zs{{-3e-6, 250.0}, models.measurement.predict(paper_pair(), x)};
  const auto est =
      extract_states(p, 1e-4, zs, paper_pair(), models.measurement, models.channels[0].clutter, FilterConfig{});
  EXPECT_EQ(est.size(), 1u);
}

TEST(Extraction, SeparatedTargetsGiveTwoEstimates) {
  Rng rng(16);
  const auto models = single_pair_models(0.99, 2.0);
  const TargetState a = state(800, 5, 1200, -3);
  const TargetState b = state(1400, -4, 600, 6);
  ParticleSystem p = cloud(a, 500, 1.0, 2.0, rng);
  const ParticleSystem q = cloud(b, 500, 1.0, 2.0, rng);
  p.particles.insert(p.particles.end(), q.particles.begin(), q.particles.end());
  const MeasurementSet zs{models.measurement.predict(paper_pair(), a), models.measurement.predict(paper_pair(), b)};
  const auto est =
      extract_states(p, 1e-4, zs, paper_pair(), models.measurement, models.channels[0].clutter, FilterConfig{});
  ASSERT_EQ(est.size(), 2u);
  const double da = std::min((position_of(est[0]) - position_of(a)).norm(), (position_of(est[1]) - position_of(a)).norm());
  const double db = std::min((position_of(est[0]) - position_of(b)).norm(), (position_of(est[1]) - position_of(b)).norm());
  EXPECT_LT(da, 2.0);
  EXPECT_LT(db, 2.0);
}

TEST(Scan, EmptyPairScalesByMissProbability) {
  Rng rng(17);
  const auto models = single_pair_models(0.99, 2.0);
  FilterState s;
  s.persistent = cloud(state(1000, 1, 1000, 1), 500, 1.0, 5.0, rng);
  const FilterState next = iterated_corrector_scan(s, {{}}, models, FilterConfig{}, rng);
  EXPECT_NEAR(next.persistent_mass, 0.98 * 0.01, 1e-14);
  EXPECT_TRUE(next.estimates.empty());
}

TEST(Scan, MissProbabilityCompoundsOverPairs) {
  Rng rng(18);
  const Scenario sc = paper_fig2_scenario();
  const FilterModels models = sc.filter_models();
  for (std::size_t pairs : {2u, 6u}) {
    FilterModels some = models;
    some.channels.erase(some.channels.begin() + static_cast<std::ptrdiff_t>(pairs), some.channels.end());
    FilterState s;
    s.persistent = cloud(state(1000, 1, 1000, 1), 500, 1.0, 5.0, rng);
    const FilterState next = iterated_corrector_scan(s, Scan(pairs), some, FilterConfig{}, rng);
    EXPECT_NEAR(next.persistent_mass, 0.98 * std::pow(0.01, static_cast<double>(pairs)), 1e-14);
  }
}

TEST(Scan, RejectsMismatchedScan) {
  Rng rng(19);
  EXPECT_THROW(iterated_corrector_scan(FilterState{}, Scan(2), single_pair_models(0.99, 2.0), FilterConfig{}, rng),
               std::invalid_argument);
}

TEST(Scan, ColdStartFindsSingleTarget) {
  Scenario sc = paper_fig2_scenario();
  sc.models.clutter_rate = 0.0;
  const FilterModels models = sc.filter_models();
  const MeasurementModel& meas = models.measurement;
  Rng rng(20);
  TargetState x = state(900, 10, 1100, -5);
  FilterState s;
  for (int k = 0; k < 3; ++k) {
    Scan scan;
    for (const auto& ch : models.channels) scan.push_back({meas.predict(ch.pair, x)});
    s = iterated_corrector_scan(s, scan, models, FilterConfig{}, rng);
    x = models.motion.propagate_mean(x);
  }
  EXPECT_GE(s.persistent_mass, 0.9);
  EXPECT_LE(s.persistent_mass, 1.1);
}

TEST(Scan, UniformBirthAddsConfiguredMass) {
  Rng rng(21);
  const auto models = single_pair_models(0.99, 2.0);
  FilterConfig cfg;
  cfg.birth_mode = BirthMode::uniform;
  cfg.area_of_interest = {Vector2(0, 0), Vector2(2000, 2000)};
  cfg.uniform_birth_count = 1000;
  cfg.uniform_birth_mass = 0.1;
  // no measurements: the uniform births only see the miss factor
  const FilterState next = iterated_corrector_scan(FilterState{}, {{}}, models, cfg, rng);
  EXPECT_NEAR(next.persistent_mass, 0.1 * 0.01, 1e-14);
}

TEST(Scan, DeterministicForSeed) {
  const Scenario sc = paper_fig2_scenario();
  const FilterModels models = sc.filter_models();
  const auto truth = generate_truth(sc);
  for (SensorOrder order : {SensorOrder::fixed, SensorOrder::shuffled}) {
    FilterConfig cfg;
    cfg.sensor_order = order;
    FilterState a, b;
    Rng sim_a(22), sim_b(22), filt_a(23), filt_b(23);
    for (int k = 0; k < 4; ++k) {
      a = iterated_corrector_scan(a, generate_measurements(truth[k], k, sc, sim_a).sets, models, cfg, filt_a);
      b = iterated_corrector_scan(b, generate_measurements(truth[k], k, sc, sim_b).sets, models, cfg, filt_b);
    }
    ASSERT_EQ(a.persistent.size(), b.persistent.size());
    for (std::size_t i = 0; i < a.persistent.size(); ++i) {
      EXPECT_EQ(a.persistent.particles[i].state, b.persistent.particles[i].state);
      EXPECT_EQ(a.persistent.particles[i].weight, b.persistent.particles[i].weight);
    }
    EXPECT_EQ(a.persistent_mass, b.persistent_mass);
    EXPECT_EQ(a.estimates.size(), b.estimates.size());
  }
}

TEST(FilterConfig, RejectsInvalidValues) {
  FilterConfig cfg;
  cfg.extraction_threshold = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = FilterConfig{};
  cfg.birth_mode = BirthMode::uniform;  // empty area of interest
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

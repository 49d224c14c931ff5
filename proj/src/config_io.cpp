#include "ptrack/config_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ptrack {

using nlohmann::json;

namespace {

// Reads typed values out of a JSON object while tracking the dotted path for
// diagnostics. Unknown keys are rejected so typos surface as errors.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key) const {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "missing required field");
    return convert<T>(j_.at(key), at(key));
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    return get<T>(key);
  }

  const json& raw(const std::string& key) const {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "missing required field");
    return j_.at(key);
  }

  Reader child(const std::string& key) const { return {raw(key), at(key)}; }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(at(key), "unknown field");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(where, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(where, "expected a finite number");
        return d;
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(where, "expected an integer");
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(where, "expected a string");
        return v.get<std::string>();
      } else {
        return v.get<T>();
      }
    } catch (const json::exception& e) {
      fail(where, e.what());
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& why) {
    throw ConfigError(where + ": " + why);
  }

 private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

std::vector<double> numbers(const json& v, const std::string& where, std::size_t expected) {
  if (!v.is_array() || v.size() != expected) {
    Reader::fail(where, "expected an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Reader::convert<double>(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vector2 vec2(const json& v, const std::string& where) {
  const auto n = numbers(v, where, 2);
  return {n[0], n[1]};
}

json vec_json(const Vector2& v) { return json::array({v.x(), v.y()}); }

json models_to_json(const ModelParams& m) {
  return {{"sampling_interval", m.sampling_interval},
          {"noise_intensity", m.noise_intensity},
          {"survival_probability", m.survival_probability},
          {"sigma_dt", m.sigma_dt},
          {"sigma_df", m.sigma_df},
          {"detection_probability", m.detection_probability},
          {"carrier_hz", m.carrier_hz},
          {"speed_of_light", m.speed_of_light},
          {"clutter_rate", m.clutter_rate},
          {"clutter_max_speed", m.clutter_max_speed}};
}

ModelParams models_from(const Reader& r) {
  ModelParams m;
  m.sampling_interval = r.get_or("sampling_interval", m.sampling_interval);
  m.noise_intensity = r.get_or("noise_intensity", m.noise_intensity);
  m.survival_probability = r.get_or("survival_probability", m.survival_probability);
  m.sigma_dt = r.get_or("sigma_dt", m.sigma_dt);
  m.sigma_df = r.get_or("sigma_df", m.sigma_df);
  m.detection_probability = r.get_or("detection_probability", m.detection_probability);
  m.carrier_hz = r.get_or("carrier_hz", m.carrier_hz);
  m.speed_of_light = r.get_or("speed_of_light", m.speed_of_light);
  m.clutter_rate = r.get_or("clutter_rate", m.clutter_rate);
  m.clutter_max_speed = r.get_or("clutter_max_speed", m.clutter_max_speed);
  r.finish();
  return m;
}

json birth_to_json(const BirthConfig& b) {
  return {{"max_range", b.max_range},
          {"max_speed", b.max_speed},
          {"particles_per_measurement", b.particles_per_measurement},
          {"expected_births", b.expected_births},
          {"max_retries", b.max_retries}};
}

BirthConfig birth_from(const Reader& r) {
  BirthConfig b;
  b.max_range = r.get_or("max_range", b.max_range);
  b.max_speed = r.get_or("max_speed", b.max_speed);
  b.particles_per_measurement = r.get_or("particles_per_measurement", b.particles_per_measurement);
  b.expected_births = r.get_or("expected_births", b.expected_births);
  b.max_retries = r.get_or("max_retries", b.max_retries);
  r.finish();
  return b;
}

json filter_to_json(const FilterConfig& f) {
  return {{"particles_per_target", f.particles_per_target},
          {"birth", birth_to_json(f.birth)},
          {"uniform_birth_count", f.uniform_birth_count},
          {"uniform_birth_mass", f.uniform_birth_mass},
          {"sensor_order", f.sensor_order == SensorOrder::fixed ? "fixed" : "shuffled"},
          {"extraction_threshold", f.extraction_threshold},
          {"merge_radius", f.merge_radius},
          {"mass_floor", f.mass_floor}};
}

FilterConfig filter_from(const Reader& r) {
  FilterConfig f;
  f.particles_per_target = r.get_or("particles_per_target", f.particles_per_target);
  if (r.has("birth")) f.birth = birth_from(r.child("birth"));
  f.uniform_birth_count = r.get_or<std::size_t>("uniform_birth_count", 0);
  f.uniform_birth_mass = r.get_or("uniform_birth_mass", f.uniform_birth_mass);
  const auto order = r.get_or<std::string>("sensor_order", "fixed");
  if (order == "fixed") {
    f.sensor_order = SensorOrder::fixed;
  } else if (order == "shuffled") {
    f.sensor_order = SensorOrder::shuffled;
  } else {
    Reader::fail(r.at("sensor_order"), "expected \"fixed\" or \"shuffled\"");
  }
  f.extraction_threshold = r.get_or("extraction_threshold", f.extraction_threshold);
  f.merge_radius = r.get_or("merge_radius", f.merge_radius);
  f.mass_floor = r.get_or("mass_floor", f.mass_floor);
  r.finish();
  return f;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

template <typename Fn>
void rethrow_invalid(const std::string& prefix, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(prefix + e.what());
  }
}

}  // namespace

std::string to_string(FilterKind kind) { return kind == FilterKind::phdf_m ? "phdf-m" : "phdf-u"; }

FilterKind parse_filter_kind(const std::string& name) {
  if (name == "phdf-m") return FilterKind::phdf_m;
  if (name == "phdf-u") return FilterKind::phdf_u;
  throw ConfigError("filter: expected \"phdf-m\" or \"phdf-u\", got \"" + name + "\"");
}

void ExperimentConfig::validate() const {
  if (mc_runs < 1) throw ConfigError("mc_runs: must be >= 1");
  rethrow_invalid("", [&] { scenario.validate(); });
  rethrow_invalid("filter_config: ", [&] { filter_config.validate(); });
  rethrow_invalid("ospa: ", [&] { ospa.validate(); });
}

json scenario_to_json(const Scenario& s) {
  json sensors = json::array();
  for (const auto& sensor : s.sensors) sensors.push_back(vec_json(sensor.position));
  json pairs = json::array();
  for (const auto& [a, b] : s.pairs) pairs.push_back(json::array({a, b}));
  json targets = json::array();
  for (const auto& t : s.targets) {
    targets.push_back({{"initial", json::array({t.initial(0), t.initial(1), t.initial(2), t.initial(3)})},
                       {"birth_step", t.birth_step},
                       {"death_step", t.death_step}});
  }
  return {{"name", s.name},
          {"area_of_interest", {{"lower", vec_json(s.area_of_interest.lower)}, {"upper", vec_json(s.area_of_interest.upper)}}},
          {"sensors", sensors},
          {"pairs", pairs},
          {"targets", targets},
          {"steps", s.steps},
          {"models", models_to_json(s.models)}};
}

Scenario scenario_from_json(const json& j) {
  const Reader r(j, "scenario");
  Scenario s;
  s.name = r.get_or<std::string>("name", "");

  const Reader aoi = r.child("area_of_interest");
  s.area_of_interest.lower = vec2(aoi.raw("lower"), aoi.at("lower"));
  s.area_of_interest.upper = vec2(aoi.raw("upper"), aoi.at("upper"));
  aoi.finish();

  const json& sensors = r.raw("sensors");
  if (!sensors.is_array()) Reader::fail(r.at("sensors"), "expected an array");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    s.sensors.push_back({vec2(sensors[i], r.at("sensors") + "[" + std::to_string(i) + "]")});
  }

  const json& pairs = r.raw("pairs");
  if (!pairs.is_array()) Reader::fail(r.at("pairs"), "expected an array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string where = r.at("pairs") + "[" + std::to_string(i) + "]";
    if (!pairs[i].is_array() || pairs[i].size() != 2) Reader::fail(where, "expected [first, second]");
    s.pairs.emplace_back(Reader::convert<int>(pairs[i][0], where + "[0]"),
                         Reader::convert<int>(pairs[i][1], where + "[1]"));
  }

  const json& targets = r.raw("targets");
  if (!targets.is_array()) Reader::fail(r.at("targets"), "expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Reader t(targets[i], r.at("targets") + "[" + std::to_string(i) + "]");
    TargetSpec spec;
    const auto x = numbers(t.raw("initial"), t.at("initial"), 4);
    spec.initial << x[0], x[1], x[2], x[3];
    spec.birth_step = t.get<int>("birth_step");
    spec.death_step = t.get<int>("death_step");
    t.finish();
    s.targets.push_back(spec);
  }

  s.steps = r.get<int>("steps");
  if (r.has("models")) s.models = models_from(r.child("models"));
  r.finish();

  rethrow_invalid("", [&] { s.validate(); });
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(parse_file(path)); }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string() + ": cannot write file");
  out << scenario_to_json(scenario).dump(2) << '\n';
}

Scenario resolve_scenario(const std::string& source, const std::filesystem::path& base_dir) {
  if (source == "paper_fig2") return paper_fig2_scenario();
  std::filesystem::path p(source);
  if (p.is_relative()) p = base_dir / p;
  return load_scenario(p);
}

json experiment_to_json(const ExperimentConfig& c) {
  return {{"scenario_source", c.scenario_source},
          {"scenario", scenario_to_json(c.scenario)},
          {"filter", to_string(c.filter)},
          {"filter_config", filter_to_json(c.filter_config)},
          {"ospa", {{"cutoff", c.ospa.cutoff}, {"order", c.ospa.order}}},
          {"mc_runs", c.mc_runs},
          {"master_seed", c.master_seed},
          {"output_dir", c.output_dir}};
}

ExperimentConfig experiment_from_json(const json& j, const std::filesystem::path& base_dir) {
  const Reader r(j, "");
  ExperimentConfig c;
  const json& scenario = r.raw("scenario");
  if (scenario.is_string()) {
    c.scenario_source = scenario.get<std::string>();
    c.scenario = resolve_scenario(c.scenario_source, base_dir);
  } else {
    c.scenario_source = "inline";
    c.scenario = scenario_from_json(scenario);
  }
  if (r.has("scenario_source")) (void)r.raw("scenario_source");
  c.filter = parse_filter_kind(r.get_or<std::string>("filter", "phdf-m"));
  if (r.has("filter_config")) {
    c.filter_config = filter_from(r.child("filter_config"));
  } else {
    c.filter_config.uniform_birth_count = 0;  // matched below
  }
  if (r.has("ospa")) {
    const Reader o = r.child("ospa");
    c.ospa.cutoff = o.get_or("cutoff", c.ospa.cutoff);
    c.ospa.order = o.get_or("order", c.ospa.order);
    o.finish();
  }
  c.mc_runs = r.get_or("mc_runs", c.mc_runs);
  c.master_seed = r.get_or<std::uint64_t>("master_seed", c.master_seed);
  c.output_dir = r.get_or<std::string>("output_dir", c.output_dir);
  r.finish();

  c.filter_config.area_of_interest = c.scenario.area_of_interest;
  if (c.filter_config.uniform_birth_count == 0) {
    c.filter_config.uniform_birth_count = matched_uniform_birth_count(c.scenario, c.filter_config.birth);
  }
  c.filter_config.birth_mode = c.filter == FilterKind::phdf_m ? BirthMode::adaptive : BirthMode::uniform;
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(parse_file(path), path.parent_path());
}

std::size_t matched_uniform_birth_count(const Scenario& scenario, const BirthConfig& birth) {
  const double per_pair = static_cast<double>(scenario.targets.size()) * scenario.models.detection_probability +
                          scenario.models.clutter_rate;
  const double count = static_cast<double>(birth.particles_per_measurement) * per_pair *
                       static_cast<double>(scenario.pairs.size());
  return static_cast<std::size_t>(std::max(1.0, std::round(count)));
}

}  // namespace ptrack

// track: run PHD filter experiments, score estimate files with OSPA, and
// inspect the TDOA/FDOA birth sampler.

#include "ptrack/birth.hpp"
#include "ptrack/config_io.hpp"
#include "ptrack/harness.hpp"
#include "ptrack/ospa.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ptrack::TargetState;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": not a number: '" + s + "'");
  }
}

/// Reads step,x,y (other columns ignored) into per-step position sets.
std::map<int, std::vector<TargetState>> read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split(line, ',');
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto step_col = column("step");
  const auto x_col = column("x");
  const auto y_col = column("y");
  if (!step_col || !x_col || !y_col) throw std::runtime_error(path + ": header must name step, x and y columns");

  std::map<int, std::vector<TargetState>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) throw std::runtime_error(where + ": expected " + std::to_string(header.size()) + " fields");
    const int step = static_cast<int>(parse_double(fields[*step_col], where));
    TargetState x = TargetState::Zero();
    x(0) = parse_double(fields[*x_col], where);
    x(2) = parse_double(fields[*y_col], where);
    out[step].push_back(x);
  }
  return out;
}

int cmd_run(const std::string& config_path, std::optional<int> runs, std::optional<std::uint64_t> seed,
            std::optional<std::string> filter, std::optional<std::string> out_dir, unsigned threads) {
  ptrack::ExperimentConfig config = ptrack::load_experiment(config_path);
  if (runs) config.mc_runs = *runs;
  if (seed) config.master_seed = *seed;
  if (filter) {
    config.filter = ptrack::parse_filter_kind(*filter);
    config.filter_config.birth_mode =
        config.filter == ptrack::FilterKind::phdf_m ? ptrack::BirthMode::adaptive : ptrack::BirthMode::uniform;
  }
  if (const char* env = std::getenv("TRACK_OUT_DIR"); env != nullptr && *env != '\0') config.output_dir = env;
  if (out_dir) config.output_dir = *out_dir;
  config.validate();

  const auto result = ptrack::run_monte_carlo(config, threads);
  ptrack::write_results(result, config, config.output_dir);
  std::cerr << "track: " << config.mc_runs << " run(s) of " << ptrack::to_string(config.filter) << " written to "
            << config.output_dir << '\n';
  return 0;
}

int cmd_ospa(const std::string& truth_path, const std::string& estimates_path, double cutoff, double order) {
  const ptrack::OspaParams params{cutoff, order};
  params.validate();
  const auto truth = read_state_csv(truth_path);
  const auto estimates = read_state_csv(estimates_path);
  int last = -1;
  if (!truth.empty()) last = std::max(last, truth.rbegin()->first);
  if (!estimates.empty()) last = std::max(last, estimates.rbegin()->first);
  const std::vector<TargetState> none;

  std::cout << "step,ospa_total,ospa_loc,ospa_card\n";
  for (int k = 0; k <= last; ++k) {
    const auto t = truth.find(k);
    const auto e = estimates.find(k);
    const auto r = ptrack::ospa(t == truth.end() ? none : t->second, e == estimates.end() ? none : e->second, params);
    std::cout << k << ',' << ptrack::format_number(r.total) << ',' << ptrack::format_number(r.localization) << ','
              << ptrack::format_number(r.cardinality) << '\n';
  }
  return 0;
}

struct SampleBirthArgs {
  std::vector<double> pair;
  double tdoa = 0.0;
  double fdoa = 0.0;
  int count = 500;
  std::uint64_t seed = 1;
  double sigma_dt = 20e-9;
  double sigma_df = 2.5;
  double carrier = 2.4e9;
  double max_range = 2000.0;
  double max_speed = 25.0;
};

int cmd_sample_birth(const SampleBirthArgs& a) {
  const ptrack::SensorPair pair(ptrack::SensorPose{{a.pair[0], a.pair[1]}}, ptrack::SensorPose{{a.pair[2], a.pair[3]}});
  const ptrack::MeasurementModel meas(a.sigma_dt, a.sigma_df, 1.0, a.carrier);
  ptrack::BirthConfig cfg;
  cfg.max_range = a.max_range;
  cfg.max_speed = a.max_speed;
  cfg.particles_per_measurement = a.count;
  cfg.validate();
  ptrack::Rng rng(a.seed);
  const auto samples = ptrack::sample_birth_particles(pair, {a.tdoa, a.fdoa}, meas, cfg, rng);

  using ptrack::format_number;
  std::cout << "x,vx,y,vy,range_difference,range_rate_difference,r1,alpha,theta,speed\n";
  for (const auto& s : samples) {
    std::cout << format_number(s.state(0)) << ',' << format_number(s.state(1)) << ',' << format_number(s.state(2))
              << ',' << format_number(s.state(3)) << ',' << format_number(s.position.range_difference) << ','
              << format_number(s.velocity.range_rate_difference) << ',' << format_number(s.position.first_range)
              << ',' << format_number(s.position.alpha) << ',' << format_number(s.velocity.theta) << ','
              << format_number(s.velocity.speed) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passive TDOA/FDOA multi-target tracking with particle PHD filters"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> filter;
  std::optional<std::string> out_dir;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Run Monte Carlo realizations of a scenario");
  run->add_option("--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--runs", runs, "Number of Monte Carlo runs")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--filter", filter, "Filter kind")->check(CLI::IsMember({"phdf-m", "phdf-u"}));
  run->add_option("--out", out_dir, "Output directory (overrides TRACK_OUT_DIR and the config)");
  run->add_option("--threads", threads, "Worker threads, 0 = all cores");

  std::string truth_path;
  std::string estimates_path;
  double cutoff = 20.0;
  double order = 1.0;
  auto* ospa = app.add_subcommand("ospa", "Per-step OSPA between truth and estimate CSV files");
  ospa->add_option("--truth", truth_path, "CSV with step,x,y columns")->required()->check(CLI::ExistingFile);
  ospa->add_option("--estimates", estimates_path, "CSV with step,x,y columns")->required()->check(CLI::ExistingFile);
  ospa->add_option("--cutoff", cutoff, "Cutoff c in meters");
  ospa->add_option("--order", order, "Order p");

  SampleBirthArgs sb;
  auto* sample = app.add_subcommand("sample-birth", "Emit birth particles for one TDOA/FDOA measurement as CSV");
  sample->add_option("--pair", sb.pair, "Sensor positions x1,y1,x2,y2")->required()->expected(4)->delimiter(',');
  sample->add_option("--tdoa", sb.tdoa, "TDOA in seconds")->required();
  sample->add_option("--fdoa", sb.fdoa, "FDOA in Hz")->required();
  sample->add_option("-n", sb.count, "Particle count")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sb.seed, "Random seed");
  sample->add_option("--sigma-dt", sb.sigma_dt, "TDOA noise std in seconds");
  sample->add_option("--sigma-df", sb.sigma_df, "FDOA noise std in Hz");
  sample->add_option("--fc", sb.carrier, "Carrier frequency in Hz");
  sample->add_option("--max-range", sb.max_range, "Maximum range from the first sensor in meters");
  sample->add_option("--max-speed", sb.max_speed, "Maximum target speed in m/s");

  std::string scenario_out;
  auto* scenario = app.add_subcommand("scenario", "Write the built-in paper_fig2 scenario as JSON");
  scenario->add_option("--out", scenario_out, "Destination file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, runs, seed, filter, out_dir, threads);
    if (*ospa) return cmd_ospa(truth_path, estimates_path, cutoff, order);
    if (*sample) return cmd_sample_birth(sb);
    if (*scenario) {
      ptrack::save_scenario(ptrack::paper_fig2_scenario(), scenario_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "track: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

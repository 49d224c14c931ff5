#include "ptrack/harness.hpp"

#include "ptrack/random.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace ptrack {

namespace {

constexpr std::uint64_t kSimulatorStream = 0;
constexpr std::uint64_t kFilterStream = 1;

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << body;
}

std::string run_file_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%04d", index);
  return buf;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw std::runtime_error("cannot format number");
  return {buf, res.ptr};
}

std::uint64_t run_seed(std::uint64_t master_seed, int run_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(run_index));
}

RunResult run_single(const ExperimentConfig& config, int run_index) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario& scenario = config.scenario;
  const std::uint64_t seed = run_seed(config.master_seed, run_index);
  Rng sim_rng(derive_seed(seed, kSimulatorStream));
  Rng filter_rng(derive_seed(seed, kFilterStream));

  const FilterModels models = scenario.filter_models();
  FilterConfig cfg = config.filter_config;
  cfg.birth_mode = config.filter == FilterKind::phdf_m ? BirthMode::adaptive : BirthMode::uniform;

  const std::vector<TruthStep> truth = generate_truth(scenario);
  RunResult result;
  result.run_index = run_index;
  result.steps.reserve(truth.size());

  FilterState state;
  double newborn_total = 0.0;
  for (int k = 0; k < scenario.steps; ++k) {
    const auto& present = truth[static_cast<std::size_t>(k)];
    const ScanMeasurements scan = generate_measurements(present, k, scenario, sim_rng);
    state = iterated_corrector_scan(state, scan.sets, models, cfg, filter_rng);
    newborn_total += state.newborn_mass;

    StepResult row;
    row.step = k;
    row.estimates = state.estimates;
    row.estimated_cardinality = state.persistent_mass;
    row.true_cardinality = static_cast<int>(present.size());
    row.ospa = ospa(states_of(present), state.estimates, config.ospa);
    result.steps.push_back(std::move(row));
  }
  result.mean_newborn_mass = scenario.steps > 0 ? newborn_total / scenario.steps : 0.0;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty series");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> aggregate(const std::vector<RunResult>& runs) {
  std::vector<SummaryRow> out;
  if (runs.empty()) return out;
  const std::size_t steps = runs.front().steps.size();
  for (const auto& r : runs) {
    if (r.steps.size() != steps) throw std::invalid_argument("runs differ in step count");
  }
  std::vector<double> total(runs.size()), loc(runs.size()), card(runs.size()), est(runs.size()), n(runs.size());
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const StepResult& s = runs[i].steps[k];
      total[i] = s.ospa.total;
      loc[i] = s.ospa.localization;
      card[i] = s.ospa.cardinality;
      est[i] = s.estimated_cardinality;
      n[i] = static_cast<double>(s.estimates.size());
    }
    const StepResult& first = runs.front().steps[k];
    out.push_back({first.step, median(total), median(loc), median(card), median(est), first.true_cardinality,
                   median(n)});
  }
  return out;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const auto runs = static_cast<std::size_t>(config.mc_runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));

  MonteCarloResult result;
  result.runs.resize(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        result.runs[i] = run_single(config, static_cast<int>(i));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.summary = aggregate(result.runs);
  return result;
}

std::string run_csv(const RunResult& run) {
  std::ostringstream out;
  out << "step,ospa_total,ospa_loc,ospa_card,est_cardinality,true_cardinality,n_estimates\n";
  for (const auto& s : run.steps) {
    out << s.step << ',' << format_number(s.ospa.total) << ',' << format_number(s.ospa.localization) << ','
        << format_number(s.ospa.cardinality) << ',' << format_number(s.estimated_cardinality) << ','
        << s.true_cardinality << ',' << s.estimates.size() << '\n';
  }
  return out.str();
}

std::string estimates_csv(const RunResult& run) {
  std::ostringstream out;
  out << "step,x,vx,y,vy\n";
  for (const auto& s : run.steps) {
    for (const auto& e : s.estimates) {
      out << s.step << ',' << format_number(e(0)) << ',' << format_number(e(1)) << ',' << format_number(e(2)) << ','
          << format_number(e(3)) << '\n';
    }
  }
  return out.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "step,ospa_total,ospa_loc,ospa_card,est_cardinality,true_cardinality,n_estimates\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_number(r.ospa_total) << ',' << format_number(r.ospa_loc) << ','
        << format_number(r.ospa_card) << ',' << format_number(r.est_cardinality) << ',' << r.true_cardinality << ','
        << format_number(r.n_estimates) << '\n';
  }
  return out.str();
}

std::string truth_csv(const Scenario& scenario) {
  std::ostringstream out;
  out << "step,id,x,vx,y,vy\n";
  const auto truth = generate_truth(scenario);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    for (const auto& t : truth[k]) {
      out << k << ',' << t.id << ',' << format_number(t.state(0)) << ',' << format_number(t.state(1)) << ','
          << format_number(t.state(2)) << ',' << format_number(t.state(3)) << '\n';
    }
  }
  return out.str();
}

void write_results(const MonteCarloResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "runs");
  write_file(out_dir / "summary.csv", summary_csv(result.summary));
  write_file(out_dir / "truth.csv", truth_csv(config.scenario));
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& run : result.runs) {
    const std::string stem = run_file_stem(run.run_index);
    write_file(out_dir / "runs" / (stem + ".csv"), run_csv(run));
    write_file(out_dir / "runs" / (stem + "_estimates.csv"), estimates_csv(run));
    stats.push_back({{"run", run.run_index},
                     {"seed", run_seed(config.master_seed, run.run_index)},
                     {"wall_seconds", run.wall_seconds},
                     {"mean_newborn_mass", run.mean_newborn_mass}});
  }
  write_file(out_dir / "config.json", experiment_to_json(config).dump(2) + "\n");
  write_file(out_dir / "run_stats.json", stats.dump(2) + "\n");
}

}  // namespace ptrack

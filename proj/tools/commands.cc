#include "commands.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sls/errors.h"
#include "sls/random.h"

namespace sls::cli {
namespace {

namespace fs = std::filesystem;

std::string_view Trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

template <class T>
T ParseNumber(std::string_view key, std::string_view value) {
  T parsed{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError(0, 0, "invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return parsed;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ParseError(0, 0, "invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string FormatFraction(double value) { return fmt::format("{:.6f}", value); }

std::string FormatAccuracy(const Score& score) {
  const std::optional<double> accuracy = score.accuracy();
  return accuracy ? FormatFraction(*accuracy) : std::string("n/a");
}

void Accumulate(Score& into, const Score& score) {
  into.matched += score.matched;
  into.total += score.total;
}

// Per-trial accuracies for each scope, one entry per trial.
struct TrialScores {
  std::vector<std::pair<Score, Score>> per_scenario;  // (ds, logic)
  Score ds_total;
  Score logic_total;
};

TrialScores RunTrial(const std::vector<NamedScenario>& corpus, const Settings& settings,
                     std::uint64_t trial) {
  TrialScores scores;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    NoiseModel noise = settings.noise;
    noise.seed = TrialSeed(settings.noise.seed, trial, s);
    const Scenario noisy = InjectNoise(corpus[s].scenario, noise);
    const Score ds = ScoreTrace(RunEngine(Engine::kDs, noisy, settings));
    const Score logic = ScoreTrace(RunEngine(Engine::kLogic, noisy, settings));
    Accumulate(scores.ds_total, ds);
    Accumulate(scores.logic_total, logic);
    scores.per_scenario.emplace_back(ds, logic);
  }
  return scores;
}

MonteCarloRow Summarize(std::string scope, Engine engine, std::vector<double> accuracies) {
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  const std::size_t n = accuracies.size();
  return MonteCarloRow{.scope = std::move(scope),
                       .engine = engine,
                       .mean_accuracy = sum / static_cast<double>(n),
                       .p05_accuracy = Percentile05(std::move(accuracies)),
                       .trials = n};
}

}  // namespace

std::string_view ToString(Engine engine) { return engine == Engine::kDs ? "ds" : "logic"; }

void ApplyConfigValue(std::string_view key, std::string_view value, Settings& settings) {
  if (key == "stale_after_ms") {
    settings.engine.stale_after_ms = ParseNumber<TimeMs>(key, value);
  } else if (key == "exit_pending_ttl_ms") {
    settings.engine.exit_pending_ttl_ms = ParseNumber<TimeMs>(key, value);
  } else if (key == "exit_mode_ttl_ms") {
    settings.engine.exit_mode_ttl_ms = ParseNumber<TimeMs>(key, value);
  } else if (key == "ignore_left_side") {
    settings.engine.ignore_left_side = ParseBool(key, value);
  } else if (key == "miss_main") {
    settings.noise.miss_main = ParseNumber<double>(key, value);
  } else if (key == "miss_sub") {
    settings.noise.miss_sub = ParseNumber<double>(key, value);
  } else if (key == "seed") {
    settings.noise.seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "vision_trust") {
    settings.reliability.vision_trust = ParseNumber<double>(key, value);
  } else if (key == "carto_trust") {
    settings.reliability.carto_trust = ParseNumber<double>(key, value);
  } else if (key == "rho_res") {
    settings.lane.hough.rho_res = ParseNumber<double>(key, value);
  } else if (key == "theta_res") {
    settings.lane.hough.theta_res_deg = ParseNumber<double>(key, value);
  } else if (key == "threshold") {
    settings.lane.hough.threshold = ParseNumber<std::int64_t>(key, value);
  } else if (key == "memory_capacity") {
    settings.lane.memory_capacity = ParseNumber<std::size_t>(key, value);
  } else if (key == "min_span") {
    settings.lane.min_span = ParseNumber<double>(key, value);
  } else {
    throw ParseError(0, 0, "unknown configuration key '" + std::string(key) + "'");
  }
}

void ApplyConfig(std::string_view text, Settings& settings) {
  int line_no = 0;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected 'key = value'");
    try {
      ApplyConfigValue(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), settings);
    } catch (const ParseError& e) {
      throw ParseError(line_no, 1, e.message());
    }
  }
}

Scenario LoadScenario(const fs::path& path) {
  const std::string text = ReadFile(path);
  try {
    return ParseScenario(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path.filename().string() + ": " + e.message());
  }
}

std::vector<NamedScenario> LoadCorpus(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ParseError(0, 0, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scn") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedScenario> corpus;
  for (const fs::path& file : files) {
    corpus.push_back({file.stem().string(), LoadScenario(file)});
  }
  return corpus;
}

Trace RunEngine(Engine engine, const Scenario& scenario, const Settings& settings) {
  if (engine == Engine::kDs) return DsRun(scenario.events, settings.reliability);
  return Run(scenario.events, settings.engine);
}

Score ScoreTrace(const Trace& trace) {
  Score score;
  for (const TraceRow& row : trace) {
    if (row.event != "truth") continue;
    ++score.total;
    // detail is "limit=<value>"
    if (row.detail.substr(row.detail.find('=') + 1) == row.validated) ++score.matched;
  }
  return score;
}

ComparisonReport Compare(const std::vector<NamedScenario>& corpus, const Settings& settings) {
  ComparisonReport report;
  for (const NamedScenario& named : corpus) {
    for (Engine engine : {Engine::kLogic, Engine::kDs}) {
      const Trace trace = RunEngine(engine, named.scenario, settings);
      const Score score = ScoreTrace(trace);
      Accumulate(engine == Engine::kDs ? report.ds_total : report.logic_total, score);
      report.rows.push_back({named.name, engine, score,
                             trace.empty() ? std::string("unknown") : trace.back().validated});
    }
  }
  return report;
}

std::string ComparisonReport::ToCsv() const {
  std::string out = "scenario,engine,accuracy,matched,total,final\n";
  for (const ComparisonRow& row : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", row.scenario, ToString(row.engine),
                       FormatAccuracy(row.score), row.score.matched, row.score.total,
                       row.final_validated);
  }
  out += fmt::format("aggregate,ds,{},{},{},\n", FormatAccuracy(ds_total), ds_total.matched,
                     ds_total.total);
  out += fmt::format("aggregate,logic,{},{},{},\n", FormatAccuracy(logic_total),
                     logic_total.matched, logic_total.total);
  return out;
}

std::uint64_t TrialSeed(std::uint64_t seed, std::uint64_t trial, std::uint64_t scenario) {
  return SplitMix64At(SplitMix64At(seed, trial), scenario);
}

double Percentile05(std::vector<double> values) {
  if (values.empty()) throw ConfigError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(values.size())));
  return values[rank == 0 ? 0 : rank - 1];
}

MonteCarloReport MonteCarlo(const std::vector<NamedScenario>& corpus, const Settings& settings,
                            std::size_t trials, std::size_t jobs) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  settings.noise.Validate();
  settings.engine.Validate();
  settings.reliability.Validate();

  std::vector<std::optional<TrialScores>> results(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t t = next++; t < trials && !failed; t = next++) {
      try {
        results[t] = RunTrial(corpus, settings, t);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < std::max<std::size_t>(jobs, 1); ++j) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloReport report;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (!results.front()->per_scenario[s].first.accuracy()) continue;
    for (Engine engine : {Engine::kDs, Engine::kLogic}) {
      std::vector<double> accuracies;
      for (const auto& trial : results) {
        const auto& [ds, logic] = trial->per_scenario[s];
        accuracies.push_back(*(engine == Engine::kDs ? ds : logic).accuracy());
      }
      report.rows.push_back(Summarize(corpus[s].name, engine, std::move(accuracies)));
    }
  }
  if (results.front()->logic_total.total > 0) {
    for (Engine engine : {Engine::kDs, Engine::kLogic}) {
      std::vector<double> accuracies;
      for (const auto& trial : results) {
        accuracies.push_back(
            *(engine == Engine::kDs ? trial->ds_total : trial->logic_total).accuracy());
      }
      report.rows.push_back(Summarize("all", engine, std::move(accuracies)));
    }
  }
  return report;
}

std::string MonteCarloReport::ToCsv() const {
  std::string out = "scope,engine,mean_accuracy,p05_accuracy,trials\n";
  for (const MonteCarloRow& row : rows) {
    out += fmt::format("{},{},{},{},{}\n", row.scope, ToString(row.engine),
                       FormatFraction(row.mean_accuracy), FormatFraction(row.p05_accuracy),
                       row.trials);
  }
  return out;
}

std::string LaneDemoCsv(const std::vector<FrameResult>& results) {
  std::string out = "frame,offset,lane_change\n";
  for (const FrameResult& r : results) {
    out += fmt::format("{},{},{}\n", r.frame,
                       r.offset ? fmt::format("{:.3f}", *r.offset) : std::string("missing"),
                       r.lane_change ? ToString(r.lane_change->direction) : std::string_view());
  }
  return out;
}

namespace {

// Config keys exposed as --<key> (and the hyphenated spelling).
constexpr std::string_view kEngineKeys[] = {"stale_after_ms", "exit_pending_ttl_ms",
                                            "exit_mode_ttl_ms", "ignore_left_side",
                                            "vision_trust", "carto_trust"};
constexpr std::string_view kNoiseKeys[] = {"seed", "miss_main", "miss_sub"};
constexpr std::string_view kLaneKeys[] = {"rho_res", "theta_res", "threshold",
                                          "memory_capacity", "min_span"};

struct CommandLine {
  std::string out_path;
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

std::string Hyphenated(std::string_view key) {
  std::string s(key);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

void AddCommon(CLI::App* sub, CommandLine& cl) {
  sub->add_option("--out", cl.out_path, "Output file (default: stdout)");
  sub->add_option("--config", cl.config_path, "Configuration file of 'key = value' lines");
}

template <std::size_t N>
void AddOverrides(CLI::App* sub, CommandLine& cl, const std::string_view (&keys)[N]) {
  for (std::string_view key : keys) {
    const std::string name(key);
    std::string flags = "--" + name;
    if (name.find('_') != std::string::npos) flags += ",--" + Hyphenated(key);
    sub->add_option_function<std::string>(
        flags, [&cl, name](const std::string& value) { cl.overrides[name] = value; },
        "Override " + name);
  }
}

// Defaults, then the config file, then flags.
Settings ResolveSettings(const CommandLine& cl) {
  Settings settings;
  if (!cl.config_path.empty()) {
    try {
      ApplyConfig(ReadFile(cl.config_path), settings);
    } catch (const ParseError& e) {
      throw ParseError(e.line(), e.column(), cl.config_path + ": " + e.message());
    }
  }
  for (const auto& [key, value] : cl.overrides) ApplyConfigValue(key, value, settings);
  settings.engine.Validate();
  settings.reliability.Validate();
  return settings;
}

// Writes to --out when given, else to out.
void Emit(const CommandLine& cl, const std::string& text, std::ostream& out) {
  if (cl.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cl.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw ParseError(0, 0, "cannot write " + cl.out_path);
  file << text;
  if (!file) throw ParseError(0, 0, "failed writing " + cl.out_path);
}

}  // namespace

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speed-limit determination from vision, cartography and lane changes"};
  app.require_subcommand(1);
  CommandLine cl;

  std::string scenario_path;
  std::string engine_name = "logic";
  CLI::App* run = app.add_subcommand("run", "Replay a scenario through one engine");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--engine", engine_name, "logic or ds")
      ->check(CLI::IsMember({"logic", "ds"}));
  AddCommon(run, cl);
  AddOverrides(run, cl, kEngineKeys);

  std::string corpus_dir;
  CLI::App* compare = app.add_subcommand("compare", "Score both engines on a scenario corpus");
  compare->add_option("scenario_dir", corpus_dir, "Directory of .scn files")->required();
  AddCommon(compare, cl);
  AddOverrides(compare, cl, kEngineKeys);

  std::size_t trials = 1000;
  std::size_t jobs = 1;
  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "Score both engines on noise-injected corpus replicas");
  montecarlo->add_option("scenario_dir", corpus_dir, "Directory of .scn files")->required();
  montecarlo->add_option("--trials", trials, "Number of noisy replicas");
  montecarlo->add_option("--jobs", jobs, "Worker threads (results do not depend on it)");
  AddCommon(montecarlo, cl);
  AddOverrides(montecarlo, cl, kEngineKeys);
  AddOverrides(montecarlo, cl, kNoiseKeys);

  std::string frames_path;
  CLI::App* lane_demo =
      app.add_subcommand("lane-demo", "Detect lane changes in a gradient raster sequence");
  lane_demo->add_option("frames", frames_path, "Raster sequence file")->required();
  AddCommon(lane_demo, cl);
  AddOverrides(lane_demo, cl, kLaneKeys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const int code = app.exit(e, help, help);
    (code == 0 ? out : err) << help.str();
    return code == 0 ? kOk : kInputError;
  }

  try {
    const Settings settings = ResolveSettings(cl);
    if (run->parsed()) {
      const Scenario scenario = LoadScenario(scenario_path);
      const Engine engine = engine_name == "ds" ? Engine::kDs : Engine::kLogic;
      std::string csv;
      try {
        csv = WriteTrace(RunEngine(engine, scenario, settings));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        err << "engine error: " << e.what() << '\n';
        return kEngineError;
      }
      Emit(cl, csv, out);
    } else if (compare->parsed() || montecarlo->parsed()) {
      const std::vector<NamedScenario> corpus = LoadCorpus(corpus_dir);
      if (corpus.empty()) throw ParseError(0, 0, "no .scn files in " + corpus_dir);
      if (montecarlo->parsed()) {
        if (trials < 1) throw ParseError(0, 0, "--trials must be at least 1");
        settings.noise.Validate();
      }
      std::string csv;
      try {
        csv = compare->parsed() ? Compare(corpus, settings).ToCsv()
                                : MonteCarlo(corpus, settings, trials, jobs).ToCsv();
      } catch (const Error& e) {
        err << "engine error: " << e.what() << '\n';
        return kEngineError;
      }
      Emit(cl, csv, out);
    } else if (lane_demo->parsed()) {
      std::ifstream in(frames_path, std::ios::binary);
      if (!in) throw ParseError(0, 0, "cannot read " + frames_path);
      std::vector<GradientImage> frames;
      try {
        frames = ParseRasterSequence(in);
      } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), frames_path + ": " + e.message());
      }
      const std::vector<FrameResult> results = RunLanePipeline(frames, settings.lane);
      const std::string csv = LaneDemoCsv(results);
      Emit(cl, csv, out);
      if (!cl.out_path.empty()) {
        std::size_t events = 0;
        for (const FrameResult& r : results) {
          if (!r.lane_change) continue;
          ++events;
          out << "frame " << r.frame << ": lane change " << ToString(r.lane_change->direction)
              << '\n';
        }
        out << events << " lane change(s) in " << results.size() << " frames\n";
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "engine error: " << e.what() << '\n';
    return kEngineError;
  }
  return kOk;
}

}  // namespace sls::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sls/evidence.h"
#include "sls/fusion_logic.h"
#include "sls/lane_vision.h"
#include "sls/scenario.h"
#include "sls/trace.h"

namespace sls::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kEngineError = 3 };

enum class Engine { kLogic, kDs };

std::string_view ToString(Engine engine);

// Everything a command can be configured with.
struct Settings {
  EngineConfig engine;
  NoiseModel noise;
  ReliabilityModel reliability;
  LanePipelineParams lane;
};

// Applies `key = value` lines ('#' comments, blank lines allowed). Keys are
// the field names of EngineConfig, NoiseModel, ReliabilityModel and the lane
// pipeline (rho_res, theta_res, threshold, memory_capacity, min_span).
// Throws ParseError on unknown keys or malformed values.
void ApplyConfig(std::string_view text, Settings& settings);
void ApplyConfigValue(std::string_view key, std::string_view value, Settings& settings);

struct NamedScenario {
  std::string name;  // file stem
  Scenario scenario;
};

// Every *.scn file of dir, sorted by file name. Throws ParseError (with the
// file name prefixed) on unreadable or malformed files.
std::vector<NamedScenario> LoadCorpus(const std::filesystem::path& dir);
Scenario LoadScenario(const std::filesystem::path& path);

Trace RunEngine(Engine engine, const Scenario& scenario, const Settings& settings);

struct Score {
  std::size_t matched = 0;
  std::size_t total = 0;

  // nullopt when the trace held no truth annotation.
  std::optional<double> accuracy() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(matched) / static_cast<double>(total);
  }
};

// A truth annotation is matched when the validated limit on its own row
// equals it. Truth rows sort after every other event with the same
// timestamp, so that is the limit after all events at that instant.
Score ScoreTrace(const Trace& trace);

struct ComparisonRow {
  std::string scenario;
  Engine engine = Engine::kLogic;
  Score score;
  std::string final_validated;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  Score ds_total;
  Score logic_total;

  // CSV: scenario,engine,accuracy,matched,total,final. Unscored scenarios
  // show n/a; aggregate rows close the report, logic last.
  std::string ToCsv() const;
};

ComparisonReport Compare(const std::vector<NamedScenario>& corpus, const Settings& settings);

struct MonteCarloRow {
  std::string scope;  // scenario name or "all"
  Engine engine = Engine::kLogic;
  double mean_accuracy = 0.0;
  double p05_accuracy = 0.0;
  std::size_t trials = 0;
};

struct MonteCarloReport {
  std::vector<MonteCarloRow> rows;

  // CSV: scope,engine,mean_accuracy,p05_accuracy,trials.
  std::string ToCsv() const;
};

// Noise seed of scenario s in trial t.
std::uint64_t TrialSeed(std::uint64_t seed, std::uint64_t trial, std::uint64_t scenario);

// Nearest-rank 5th percentile of values (non-empty).
double Percentile05(std::vector<double> values);

// Trials run on `jobs` threads and are reduced in trial order.
MonteCarloReport MonteCarlo(const std::vector<NamedScenario>& corpus, const Settings& settings,
                            std::size_t trials, std::size_t jobs = 1);

// CSV: frame,offset,lane_change with offsets to 3 decimals, "missing" for
// frames without a marking and an empty lane_change when nothing fired.
std::string LaneDemoCsv(const std::vector<FrameResult>& results);

// Entry point behind the `sls` executable.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sls::cli

// Acceptance gate: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <unistd.h>

#include "commands.h"
#include "ds_oracle.h"
#include "hough_oracle.h"
#include "random_scenarios.h"
#include "reference_interpreter.h"
#include "sls/evidence.h"
#include "sls/fusion_logic.h"
#include "sls/lane_vision.h"
#include "sls/scenario.h"

namespace sls {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances.
constexpr double kScenarioBudgetSeconds = 1.0;
constexpr double kMonotonicityBudgetSeconds = 30.0;
constexpr double kMassTolerance = 1e-9;
constexpr double kDropRate = 0.10;
constexpr double kDropTolerance = 0.01;
// Drops at miss_main = 0.10, seed 1, over 10 000 plain vision events. Frozen
// after the first run; any change here means the noise stream changed.
constexpr std::size_t kFrozenDropCount = 1073;

const fs::path kSource = SLS_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Scenario Load(const std::string& name) {
  return ParseScenario(ReadFile(kSource / "scenarios" / (name + ".scn")));
}

std::string FinalValidated(const Trace& trace) {
  return trace.empty() ? "unknown" : trace.back().validated;
}

Outcome Fig3Scenario() {
  const Stopwatch clock;
  const Scenario s = Load("fig3");
  const Trace trace = Run(s.events, EngineConfig{});
  const double elapsed = clock.seconds();

  bool held = false;
  bool changed = false;
  for (const TraceRow& row : trace) {
    if (row.event == "lane_change") {
      changed = true;
      continue;
    }
    if (!changed && row.event == "truth") held = row.validated == "80";
  }
  const std::string final_limit = FinalValidated(trace);
  return {held && changed && final_limit == "50" && elapsed < kScenarioBudgetSeconds,
          fmt::format("held 80 before lane change: {}, final {}, {:.3f} s", held, final_limit,
                      elapsed)};
}

Outcome Fig6Scenario() {
  const Stopwatch clock;
  const Scenario s = Load("fig6");
  const std::string logic = FinalValidated(Run(s.events, EngineConfig{}));
  const std::string ds = FinalValidated(DsRun(s.events, ReliabilityModel{}));
  const double elapsed = clock.seconds();
  return {logic == "50" && ds == "80" && elapsed < kScenarioBudgetSeconds,
          fmt::format("logic {}, ds {}, {:.3f} s", logic, ds, elapsed)};
}

Outcome AmbiguityGuard() {
  SplitMix64 rng(3);
  std::size_t checked = 0;
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const EngineConfig config = i % 2 == 0 ? EngineConfig{} : testing::RandomConfig(rng);
    std::vector<SensorEvent> events = testing::RandomEvents(rng, 100);
    // Make sure each case holds at least one ambiguous reading.
    const TimeMs t = events.empty() ? 0 : events[rng.NextBelow(events.size())].t;
    events.push_back({t, CartoEvent{testing::RandomLimit(rng), true}});
    events = OrderEvents(std::move(events));

    EngineState state = Init(config);
    for (const SensorEvent& e : events) {
      const EngineState before = state;
      state = Step(state, e, config).first;
      const auto* carto = std::get_if<CartoEvent>(&e.payload);
      if (!carto || !carto->ambiguous) continue;
      ++checked;
      if (!(state.validated == before.validated) || state.validated_at != before.validated_at) {
        ++violations;
      }
    }
  }
  return {violations == 0,
          fmt::format("{} ambiguous readings over 1000 cases, {} violations", checked, violations)};
}

Outcome ExitLaneMonotonicity() {
  const Stopwatch clock;
  SplitMix64 rng(4);
  std::size_t intervals = 0;
  std::size_t violations = 0;
  for (int i = 0; i < 10'000; ++i) {
    const EngineConfig config = i % 2 == 0 ? EngineConfig{} : testing::RandomConfig(rng);
    const std::vector<SensorEvent> events =
        testing::RandomEvents(rng, 1 + rng.NextBelow(200));
    EngineState state = Init(config);
    for (const SensorEvent& e : events) {
      const EngineState before = state;
      state = Step(state, e, config).first;
      if (before.mode != Mode::kExitLane && state.mode == Mode::kExitLane) ++intervals;
      const bool vision = std::holds_alternative<VisionEvent>(e.payload);
      if (vision && before.mode == Mode::kExitLane && state.mode == Mode::kExitLane &&
          before.validated.IsBelow(state.validated)) {
        ++violations;
      }
    }
  }
  const double elapsed = clock.seconds();
  return {violations == 0 && elapsed < kMonotonicityBudgetSeconds,
          fmt::format("{} exit-lane intervals, {} violations, {:.2f} s", intervals, violations,
                      elapsed)};
}

Outcome ReferenceAgreement() {
  SplitMix64 rng(5);
  std::size_t mismatches = 0;
  std::size_t rows = 0;
  for (int i = 0; i < 1000; ++i) {
    const EngineConfig config = i % 2 == 0 ? EngineConfig{} : testing::RandomConfig(rng);
    const std::vector<SensorEvent> events =
        testing::RandomEvents(rng, 1 + rng.NextBelow(200));
    const Trace trace = Run(events, config);
    rows += trace.size();
    if (WriteTrace(trace) != testing::ReferenceTrace(events, config)) ++mismatches;
  }
  return {mismatches == 0,
          fmt::format("1000 scenarios, {} trace rows, {} mismatches", rows, mismatches)};
}

double MaxDifference(const testing::DenseMass& a, const testing::DenseMass& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double Total(const testing::DenseMass& m) {
  double sum = 0.0;
  for (double v : m) sum += v;
  return sum;
}

Outcome DempsterAlgebra() {
  SplitMix64 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Frame frame = testing::RandomFrame(rng, 1 + rng.NextBelow(4));
    const std::size_t focal = std::size_t{1} << frame.size();
    const MassFunction a = testing::RandomMass(rng, frame, 1 + rng.NextBelow(focal));
    const MassFunction b = testing::RandomMass(rng, frame, 1 + rng.NextBelow(focal));
    const MassFunction c = testing::RandomMass(rng, frame, 1 + rng.NextBelow(focal));

    const testing::DenseMass ab = testing::ToDense(Combine(a, b));
    const testing::DenseMass brute = testing::BruteForceCombine(testing::ToDense(a), testing::ToDense(b));
    for (double difference : {
             MaxDifference(ab, brute),
             MaxDifference(ab, testing::ToDense(Combine(b, a))),
             MaxDifference(testing::ToDense(Combine(Combine(a, b), c)),
                           testing::ToDense(Combine(a, Combine(b, c)))),
             MaxDifference(testing::ToDense(Combine(a, MassFunction::Vacuous(frame))),
                           testing::ToDense(a)),
             std::abs(Total(ab) - 1.0),
             std::abs(Total(brute) - 1.0),
         }) {
      worst = std::max(worst, difference);
    }
  }
  return {worst <= kMassTolerance,
          fmt::format("1000 triples, worst deviation {:.3g} (limit {:g})", worst, kMassTolerance)};
}

Outcome HoughRecovery() {
  SplitMix64 rng(7);
  const HoughParams params;
  std::size_t misses = 0;
  std::size_t shift_misses = 0;
  for (int i = 0; i < 100; ++i) {
    const int width = 60 + static_cast<int>(rng.NextBelow(81));
    const int height = 60 + static_cast<int>(rng.NextBelow(41));
    const double margin = width / 5.0;
    const double span = width - 2.0 * margin;
    const double x_top = margin + rng.NextUnit() * span;
    const double x_bottom = margin + rng.NextUnit() * span;
    const GradientImage image = RenderSyntheticRoad({width, height, {{x_top, x_bottom}}});
    const std::vector<HoughLine> lines = HoughTransform(image, params);
    const HoughLine truth = testing::TrueLine(x_top, x_bottom, width, height);
    if (lines.empty()) {
      ++misses;
      continue;
    }
    const testing::BinError err = testing::CompareBins(lines.front(), truth, params);
    if (err.theta > 1 || err.rho > 1) ++misses;

    // Shifting the image by dx moves rho by dx cos(theta).
    const int dx = static_cast<int>(rng.NextBelow(11)) - 5;
    const std::vector<HoughLine> shifted = HoughTransform(image.ShiftedX(dx), params);
    if (shifted.empty()) {
      ++shift_misses;
      continue;
    }
    HoughLine expected = lines.front();
    expected.rho += dx * std::cos(expected.theta_deg * M_PI / 180.0);
    const testing::BinError shift_err = testing::CompareBins(shifted.front(), expected, params);
    if (shift_err.theta > 1 || shift_err.rho > 1) {
      ++shift_misses;
    }
  }
  return {misses == 0 && shift_misses == 0,
          fmt::format("100 images, {} off by more than one bin, {} translation failures", misses,
                      shift_misses)};
}

std::vector<FrameResult> RunLaneFile(const std::string& name) {
  std::ifstream in(kSource / "data" / "lanes" / name, std::ios::binary);
  return RunLanePipeline(ParseRasterSequence(in), LanePipelineParams{});
}

Outcome LanePipeline() {
  std::vector<std::string> drift_events;
  for (const FrameResult& r : RunLaneFile("drift_right.frames")) {
    if (r.lane_change) drift_events.emplace_back(ToString(r.lane_change->direction));
  }
  std::size_t static_events = 0;
  for (const FrameResult& r : RunLaneFile("static.frames")) static_events += r.lane_change ? 1 : 0;
  const bool drift_ok = drift_events.size() == 1 && drift_events.front() == "right";
  return {drift_ok && static_events == 0,
          fmt::format("drift: {} event(s){}, static: {} event(s)", drift_events.size(),
                      drift_events.empty() ? "" : " " + drift_events.front(), static_events)};
}

Outcome NoiseCalibration() {
  Scenario s{"calibration", {}};
  for (int i = 0; i < 10'000; ++i) {
    s.events.push_back({static_cast<TimeMs>(i) * 100, VisionEvent{SpeedLimit::Kmh(90)}});
  }
  const Scenario noisy = InjectNoise(s, {.miss_main = 0.10, .miss_sub = 0.20, .seed = 1});
  const std::size_t dropped = s.events.size() - noisy.events.size();
  const double rate = static_cast<double>(dropped) / static_cast<double>(s.events.size());
  return {std::abs(rate - kDropRate) <= kDropTolerance && dropped == kFrozenDropCount,
          fmt::format("{} of 10000 dropped ({:.4f}), frozen value {}", dropped, rate,
                      kFrozenDropCount)};
}

int Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sls");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  return cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt::format("sls_acceptance_{}", ::getpid());
  fs::create_directories(dir);
  const std::string corpus = (kSource / "scenarios").string();
  const std::string fig6 = (kSource / "scenarios" / "fig6.scn").string();
  const std::string frames = (kSource / "data" / "lanes" / "drift_right.frames").string();
  const std::vector<std::vector<std::string>> commands = {
      {"run", fig6, "--engine", "logic"},
      {"run", fig6, "--engine", "ds"},
      {"compare", corpus},
      {"montecarlo", corpus, "--trials", "200", "--seed", "7", "--jobs", "4"},
      {"lane-demo", frames},
  };
  std::size_t differing = 0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / fmt::format("cmd{}_{}.out", i, rep);
      std::vector<std::string> args = commands[i];
      args.insert(args.end(), {"--out", out.string()});
      if (Invoke(args) != cli::kOk) ++failed;
      outputs[rep] = ReadFile(out);
    }
    if (outputs[0] != outputs[1] || outputs[0].empty()) ++differing;
  }
  fs::remove_all(dir);
  return {differing == 0 && failed == 0,
          fmt::format("{} commands rerun, {} differing, {} failed (single platform)",
                      commands.size(), differing, failed)};
}

}  // namespace
}  // namespace sls

int main() {
  using Criterion = std::pair<const char*, std::function<sls::Outcome()>>;
  const Criterion criteria[] = {
      {"fig3 exit-lane scenario", sls::Fig3Scenario},
      {"fig6 double-wrong scenario", sls::Fig6Scenario},
      {"ambiguity guard", sls::AmbiguityGuard},
      {"exit-lane monotonicity", sls::ExitLaneMonotonicity},
      {"reference interpreter agreement", sls::ReferenceAgreement},
      {"dempster-shafer algebra", sls::DempsterAlgebra},
      {"hough recovery", sls::HoughRecovery},
      {"lane-change pipeline", sls::LanePipeline},
      {"noise calibration", sls::NoiseCalibration},
      {"determinism", sls::Determinism},
  };
  int failures = 0;
  int number = 0;
  for (const auto& [name, check] : criteria) {
    ++number;
    sls::Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s\n", outcome.pass ? "PASS" : "FAIL", number, name,
                outcome.detail.c_str());
  }
  std::printf("%d of %d criteria passed\n", number - failures, number);
  return failures == 0 ? 0 : 1;
}

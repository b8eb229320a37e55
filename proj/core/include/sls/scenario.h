#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sls/events.h"

namespace sls {

struct Scenario {
  std::string name = "unnamed";
  // Ordered per OrderEvents.
  std::vector<SensorEvent> events;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Parses the scenario language, one statement per line:
//
//   SCENARIO <name>
//   T=<ms> VISION limit=<n|unknown> [sub=<none|exit_arrow|end_of_limit|vehicle_class|weather>]
//                 [side=<left|right>]
//   T=<ms> CARTO limit=<n|unknown> [ambiguous=<0|1>]
//   T=<ms> LANE_CHANGE dir=<left|right>
//   T=<ms> TRUTH limit=<n|unknown>
//
// '#' starts a comment. Throws ParseError with the offending line and column.
Scenario ParseScenario(std::string_view text);

// Prints a scenario back in the scenario language, always spelling out every
// attribute.
std::string FormatScenario(const Scenario& scenario);

struct NoiseModel {
  // Probability that a vision event without sub-sign is not reported.
  double miss_main = 0.10;
  // Probability that an exit-arrow sub-sign is missed while its main sign is
  // still read.
  double miss_sub = 0.20;
  std::uint64_t seed = 0;

  // Throws ConfigError unless both probabilities are in [0, 1].
  void Validate() const;
};

// Event i draws u = ToUnitInterval(SplitMix64At(seed, i)) and misses when
// u < probability. Events other than vision without sub-sign and exit-arrow
// vision are passed through unchanged.
Scenario InjectNoise(const Scenario& scenario, const NoiseModel& noise);

}  // namespace sls

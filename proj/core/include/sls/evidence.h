#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sls/events.h"
#include "sls/speed_limit.h"
#include "sls/trace.h"

namespace sls {

// Subset of a frame, bit i set when hypothesis i is included.
using HypothesisSet = std::uint32_t;

// Frame of discernment: ordered, duplicate-free, known limits only.
class Frame {
 public:
  static constexpr std::size_t kMaxHypotheses = 16;

  // Sorts ascending. Throws FrameError on empty input, duplicates, Unknown or
  // more than kMaxHypotheses entries.
  explicit Frame(std::vector<SpeedLimit> hypotheses);

  // Known limits of the vision and carto events in events, or nullopt when
  // there are none. Throws FrameError above kMaxHypotheses.
  static std::optional<Frame> FromReadings(const std::vector<SensorEvent>& events);

  std::size_t size() const { return hypotheses_.size(); }
  const std::vector<SpeedLimit>& hypotheses() const { return hypotheses_; }
  HypothesisSet full() const { return static_cast<HypothesisSet>((1ULL << size()) - 1); }

  // Throws FrameError when limit is not a hypothesis.
  std::size_t IndexOf(SpeedLimit limit) const;
  bool Contains(SpeedLimit limit) const;
  HypothesisSet Singleton(SpeedLimit limit) const { return HypothesisSet{1} << IndexOf(limit); }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<SpeedLimit> hypotheses_;
};

// Basic belief assignment. Only focal elements (non-zero mass) are stored.
class MassFunction {
 public:
  // All mass on the full frame.
  static MassFunction Vacuous(const Frame& frame);

  // Throws FrameError on out-of-frame or empty subsets, ConfigError on
  // negative weights or weights not summing to 1 within 1e-9.
  MassFunction(Frame frame, std::map<HypothesisSet, double> masses);

  const Frame& frame() const { return frame_; }
  const std::map<HypothesisSet, double>& focal() const { return masses_; }
  double mass(HypothesisSet subset) const;
  double total() const;

 private:
  Frame frame_;
  std::map<HypothesisSet, double> masses_;
};

struct ReliabilityModel {
  double vision_trust = 0.9;
  double carto_trust = 0.8;

  // Throws ConfigError unless both trusts are in (0, 1].
  void Validate() const;
};

// Simple support: trust on {reading}, the rest on the frame. Unknown readings
// are vacuous.
MassFunction MassFromReading(const Frame& frame, SpeedLimit reading, double trust);

// Dempster's rule. Throws FrameError for different frames and ConflictError
// when the conflict mass is 1 within 1e-12.
MassFunction Combine(const MassFunction& a, const MassFunction& b);

// Sum of the masses of focal elements intersecting subset.
double Plausibility(const MassFunction& m, HypothesisSet subset);
// Throws FrameError when hypothesis is not in the frame.
double Plausibility(const MassFunction& m, SpeedLimit hypothesis);

// Maximum-plausibility singleton after combining both readings, ties going
// to the lower limit. Unknown when both readings are Unknown.
SpeedLimit DsDecide(SpeedLimit vision, SpeedLimit carto, const Frame& frame,
                    const ReliabilityModel& reliability);

// Re-decides from the last vision and carto readings after every event.
// Lane changes and truth annotations leave the readings untouched.
Trace DsRun(const std::vector<SensorEvent>& events, const Frame& frame,
            const ReliabilityModel& reliability);

// DsRun over the frame built from the events' own readings; every row is
// Unknown when the events carry no known reading.
Trace DsRun(const std::vector<SensorEvent>& events, const ReliabilityModel& reliability);

}  // namespace sls

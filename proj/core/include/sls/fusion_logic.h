#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sls/events.h"
#include "sls/speed_limit.h"
#include "sls/trace.h"

namespace sls {

enum class Mode { kStandard, kExitSignDetected, kExitLane };

// "standard", "exit_sign_detected" or "exit_lane".
std::string_view ToString(Mode mode);

struct EngineConfig {
  // Age beyond which the validated limit yields to an unambiguous map limit.
  TimeMs stale_after_ms = 30'000;
  // How long an exit-lane limit stays armed waiting for the lane change.
  TimeMs exit_pending_ttl_ms = 20'000;
  // Fallback return from exit-lane mode to standard mode.
  TimeMs exit_mode_ttl_ms = 60'000;
  // Drop every vision event reported on the left side of the road.
  bool ignore_left_side = false;

  // Throws ConfigError unless every duration is strictly positive.
  void Validate() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

struct EngineState {
  Mode mode = Mode::kStandard;
  SpeedLimit validated;
  TimeMs validated_at = 0;
  // Armed exit-lane limit; present iff mode == kExitSignDetected.
  std::optional<SpeedLimit> pending_exit_limit;
  std::optional<TimeMs> pending_since;
  // Side of the road the exit lane lies on, taken from the arming sign.
  std::optional<Side> pending_side;
  // Present iff mode == kExitLane.
  std::optional<TimeMs> exit_entered_at;
  // Timestamp of the last stepped event.
  TimeMs clock = 0;

  // Empty when every state-field coupling holds, else a description of the
  // first violation.
  std::optional<std::string> CheckInvariants() const;

  friend bool operator==(const EngineState&, const EngineState&) = default;
};

// Throws ConfigError when the config is invalid.
EngineState Init(const EngineConfig& config);

// Applies one event. Returns the next state and its validated limit.
// Throws ClockError when event.t precedes state.clock.
std::pair<EngineState, SpeedLimit> Step(const EngineState& state, const SensorEvent& event,
                                        const EngineConfig& config);

// Folds Step over events, recording one trace row per event.
Trace Run(const std::vector<SensorEvent>& events, const EngineConfig& config);

}  // namespace sls

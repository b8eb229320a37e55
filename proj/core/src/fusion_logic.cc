#include "sls/fusion_logic.h"

#include <string>
#include <variant>

#include "overloaded.h"
#include "sls/errors.h"

namespace sls {
namespace {

using internal::Overloaded;

void Validate(const SensorEvent& event, const EngineState& state) {
  if (event.t < state.clock) {
    throw ClockError("event at t=" + std::to_string(event.t) + " ms precedes engine clock " +
                     std::to_string(state.clock) + " ms");
  }
  sls::Validate(event);
}

void Validate(SpeedLimit limit, TimeMs at, EngineState& state) {
  state.validated = limit;
  state.validated_at = at;
}

void EnterStandard(EngineState& state) {
  state.mode = Mode::kStandard;
  state.pending_exit_limit.reset();
  state.pending_since.reset();
  state.pending_side.reset();
  state.exit_entered_at.reset();
}

// Timeouts run before the event itself is interpreted.
void Expire(EngineState& state, TimeMs now, const EngineConfig& config) {
  if (state.mode == Mode::kExitLane && now - *state.exit_entered_at > config.exit_mode_ttl_ms) {
    EnterStandard(state);
  } else if (state.mode == Mode::kExitSignDetected &&
             now - *state.pending_since > config.exit_pending_ttl_ms) {
    EnterStandard(state);
  }
}

// On the exit lane only decreases are believed.
void ValidateIfDecreasing(SpeedLimit limit, TimeMs at, EngineState& state) {
  if (limit.IsBelow(state.validated)) Validate(limit, at, state);
}

void OnVision(const VisionEvent& vision, TimeMs t, const EngineConfig& config,
              EngineState& state) {
  if (config.ignore_left_side && vision.side == Side::kLeft) return;

  switch (vision.sub_sign) {
    case SubSign::kEndOfLimit:
      // Also ends an exit-lane interval: the exit road's restriction is over.
      Validate(SpeedLimit::Unknown(), t, state);
      if (state.mode == Mode::kExitLane) EnterStandard(state);
      return;
    case SubSign::kVehicleClass:
    case SubSign::kWeather:
      return;
    case SubSign::kExitArrow:
      if (state.mode == Mode::kExitLane) {
        ValidateIfDecreasing(vision.limit, t, state);
        return;
      }
      state.mode = Mode::kExitSignDetected;
      state.pending_exit_limit = vision.limit;
      state.pending_since = t;
      state.pending_side = vision.side;
      return;
    case SubSign::kNone:
      if (state.mode == Mode::kExitLane) {
        ValidateIfDecreasing(vision.limit, t, state);
      } else {
        Validate(vision.limit, t, state);
      }
      return;
  }
}

void OnLaneChange(const LaneChangeEvent& change, TimeMs t, EngineState& state) {
  if (state.mode != Mode::kExitSignDetected || change.direction != *state.pending_side) return;
  const SpeedLimit exit_limit = *state.pending_exit_limit;
  EnterStandard(state);
  state.mode = Mode::kExitLane;
  state.exit_entered_at = t;
  Validate(exit_limit, t, state);
}

void OnCarto(const CartoEvent& carto, TimeMs t, const EngineConfig& config, EngineState& state) {
  if (carto.ambiguous || carto.limit.unknown()) return;
  if (t - state.validated_at <= config.stale_after_ms) return;
  Validate(carto.limit, t, state);
  if (state.mode == Mode::kExitLane) EnterStandard(state);
}

}  // namespace

std::string_view ToString(Mode mode) {
  switch (mode) {
    case Mode::kStandard:
      return "standard";
    case Mode::kExitSignDetected:
      return "exit_sign_detected";
    case Mode::kExitLane:
      return "exit_lane";
  }
  return "standard";
}

void EngineConfig::Validate() const {
  const auto require_positive = [](TimeMs value, const char* name) {
    if (value <= 0) {
      throw ConfigError(std::string(name) + " must be strictly positive, got " +
                        std::to_string(value));
    }
  };
  require_positive(stale_after_ms, "stale_after_ms");
  require_positive(exit_pending_ttl_ms, "exit_pending_ttl_ms");
  require_positive(exit_mode_ttl_ms, "exit_mode_ttl_ms");
}

std::optional<std::string> EngineState::CheckInvariants() const {
  const bool exit_sign = mode == Mode::kExitSignDetected;
  if (pending_exit_limit.has_value() != exit_sign || pending_since.has_value() != exit_sign ||
      pending_side.has_value() != exit_sign) {
    return "pending exit fields must be present iff mode is exit_sign_detected";
  }
  if (exit_entered_at.has_value() != (mode == Mode::kExitLane)) {
    return "exit_entered_at must be present iff mode is exit_lane";
  }
  if (validated_at > clock) return "validated_at is ahead of the clock";
  if (pending_since && *pending_since > clock) return "pending_since is ahead of the clock";
  if (exit_entered_at && *exit_entered_at > clock) return "exit_entered_at is ahead of the clock";
  return std::nullopt;
}

EngineState Init(const EngineConfig& config) {
  config.Validate();
  return EngineState{};
}

std::pair<EngineState, SpeedLimit> Step(const EngineState& state, const SensorEvent& event,
                                        const EngineConfig& config) {
  Validate(event, state);
  EngineState next = state;
  next.clock = event.t;
  if (std::holds_alternative<TruthAnnotation>(event.payload)) {
    return {next, next.validated};
  }

  Expire(next, event.t, config);
  std::visit(Overloaded{
                 [&](const VisionEvent& e) { OnVision(e, event.t, config, next); },
                 [&](const LaneChangeEvent& e) { OnLaneChange(e, event.t, next); },
                 [&](const CartoEvent& e) { OnCarto(e, event.t, config, next); },
                 [](const TruthAnnotation&) {},
             },
             event.payload);
  return {next, next.validated};
}

Trace Run(const std::vector<SensorEvent>& events, const EngineConfig& config) {
  Trace trace;
  trace.reserve(events.size());
  EngineState state = Init(config);
  for (const SensorEvent& event : events) {
    const Mode before = state.mode;
    auto [next, validated] = Step(state, event, config);
    state = std::move(next);
    trace.push_back(TraceRow{
        .t = event.t,
        .event = std::string(EventKind(event.payload)),
        .detail = EventDetail(event.payload),
        .mode_before = std::string(ToString(before)),
        .mode_after = std::string(ToString(state.mode)),
        .validated = validated.ToString(),
    });
  }
  return trace;
}

}  // namespace sls

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sls/speed_limit.h"

namespace sls {

// Milliseconds since scenario start.
using TimeMs = std::int64_t;

enum class SubSign { kNone, kExitArrow, kEndOfLimit, kVehicleClass, kWeather };
enum class Side { kLeft, kRight };

struct VisionEvent {
  SpeedLimit limit;
  SubSign sub_sign = SubSign::kNone;
  Side side = Side::kRight;

  friend bool operator==(const VisionEvent&, const VisionEvent&) = default;
};

struct CartoEvent {
  SpeedLimit limit;
  // A nearby road with a different limit makes the map-matched limit unreliable.
  bool ambiguous = false;

  friend bool operator==(const CartoEvent&, const CartoEvent&) = default;
};

struct LaneChangeEvent {
  Side direction = Side::kRight;

  friend bool operator==(const LaneChangeEvent&, const LaneChangeEvent&) = default;
};

// Ground truth used for scoring only; neither engine reacts to it.
struct TruthAnnotation {
  SpeedLimit limit;

  friend bool operator==(const TruthAnnotation&, const TruthAnnotation&) = default;
};

// Alternative order is the tie-break rank for simultaneous events.
using EventPayload = std::variant<LaneChangeEvent, VisionEvent, CartoEvent, TruthAnnotation>;

struct SensorEvent {
  TimeMs t = 0;
  EventPayload payload;

  int rank() const { return static_cast<int>(payload.index()); }

  friend bool operator==(const SensorEvent&, const SensorEvent&) = default;
};

// Throws ConfigError for a negative timestamp or a vision event whose limit
// is Unknown without an end-of-limit sub-sign.
void Validate(const SensorEvent& event);

// Stable sort by (t, rank).
std::vector<SensorEvent> OrderEvents(std::vector<SensorEvent> events);

std::string_view ToString(SubSign sub_sign);
std::string_view ToString(Side side);

// Trace vocabulary: "vision", "carto", "lane_change" or "truth".
std::string_view EventKind(const EventPayload& payload);
// e.g. "limit=70 sub=none side=right", "limit=80 ambiguous=0", "dir=right".
std::string EventDetail(const EventPayload& payload);

}  // namespace sls

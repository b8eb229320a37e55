#include "sls/events.h"

#include <algorithm>

#include "overloaded.h"
#include "sls/errors.h"

namespace sls {

using internal::Overloaded;

void Validate(const SensorEvent& event) {
  if (event.t < 0) {
    throw ConfigError("negative timestamp " + std::to_string(event.t));
  }
  if (const auto* vision = std::get_if<VisionEvent>(&event.payload)) {
    if (vision->limit.unknown() && vision->sub_sign != SubSign::kEndOfLimit) {
      throw ConfigError("vision event without a limit must be an end-of-limit sign");
    }
  }
}

std::vector<SensorEvent> OrderEvents(std::vector<SensorEvent> events) {
  std::stable_sort(events.begin(), events.end(), [](const SensorEvent& a, const SensorEvent& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.rank() < b.rank();
  });
  return events;
}

std::string_view ToString(SubSign sub_sign) {
  switch (sub_sign) {
    case SubSign::kNone:
      return "none";
    case SubSign::kExitArrow:
      return "exit_arrow";
    case SubSign::kEndOfLimit:
      return "end_of_limit";
    case SubSign::kVehicleClass:
      return "vehicle_class";
    case SubSign::kWeather:
      return "weather";
  }
  return "none";
}

std::string_view ToString(Side side) { return side == Side::kLeft ? "left" : "right"; }

std::string_view EventKind(const EventPayload& payload) {
  return std::visit(Overloaded{
                        [](const LaneChangeEvent&) { return std::string_view("lane_change"); },
                        [](const VisionEvent&) { return std::string_view("vision"); },
                        [](const CartoEvent&) { return std::string_view("carto"); },
                        [](const TruthAnnotation&) { return std::string_view("truth"); },
                    },
                    payload);
}

std::string EventDetail(const EventPayload& payload) {
  return std::visit(
      Overloaded{
          [](const LaneChangeEvent& e) { return "dir=" + std::string(ToString(e.direction)); },
          [](const VisionEvent& e) {
            return "limit=" + e.limit.ToString() + " sub=" + std::string(ToString(e.sub_sign)) +
                   " side=" + std::string(ToString(e.side));
          },
          [](const CartoEvent& e) {
            return "limit=" + e.limit.ToString() + " ambiguous=" + (e.ambiguous ? "1" : "0");
          },
          [](const TruthAnnotation& e) { return "limit=" + e.limit.ToString(); },
      },
      payload);
}

}  // namespace sls

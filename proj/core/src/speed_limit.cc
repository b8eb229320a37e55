#include "sls/speed_limit.h"

#include <charconv>

#include "sls/errors.h"

namespace sls {

SpeedLimit SpeedLimit::Kmh(int kmh) {
  if (!IsValidKmh(kmh)) {
    throw ConfigError("invalid speed limit " + std::to_string(kmh) +
                      " km/h: expected a multiple of 5 in [5, 130]");
  }
  return SpeedLimit(kmh);
}

int SpeedLimit::kmh() const {
  if (unknown()) throw ConfigError("unknown speed limit has no value");
  return kmh_;
}

std::string SpeedLimit::ToString() const {
  return unknown() ? std::string("unknown") : std::to_string(kmh_);
}

std::optional<SpeedLimit> SpeedLimit::Parse(std::string_view text) {
  if (text == "unknown") return Unknown();
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !IsValidKmh(value)) {
    return std::nullopt;
  }
  return SpeedLimit(value);
}

}  // namespace sls

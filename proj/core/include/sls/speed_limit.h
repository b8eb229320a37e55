#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sls {

// A speed limit in km/h, or Unknown. Known values are multiples of 5 in
// [kMinKmh, kMaxKmh].
class SpeedLimit {
 public:
  static constexpr int kMinKmh = 5;
  static constexpr int kMaxKmh = 130;
  static constexpr int kStepKmh = 5;

  // Unknown.
  constexpr SpeedLimit() = default;

  static constexpr SpeedLimit Unknown() { return SpeedLimit(); }
  // Throws ConfigError when kmh is not a valid limit.
  static SpeedLimit Kmh(int kmh);

  static constexpr bool IsValidKmh(int kmh) {
    return kmh >= kMinKmh && kmh <= kMaxKmh && kmh % kStepKmh == 0;
  }

  constexpr bool known() const { return kmh_ != 0; }
  constexpr bool unknown() const { return kmh_ == 0; }
  // Requires known().
  int kmh() const;

  // Numeric ordering with Unknown above every known value.
  constexpr bool IsBelow(SpeedLimit other) const {
    if (unknown()) return false;
    if (other.unknown()) return true;
    return kmh_ < other.kmh_;
  }

  // "unknown" or the decimal value.
  std::string ToString() const;
  // Accepts "unknown" or a valid decimal value; nullopt otherwise.
  static std::optional<SpeedLimit> Parse(std::string_view text);

  friend constexpr bool operator==(SpeedLimit, SpeedLimit) = default;

 private:
  explicit constexpr SpeedLimit(int kmh) : kmh_(kmh) {}

  int kmh_ = 0;
};

}  // namespace sls

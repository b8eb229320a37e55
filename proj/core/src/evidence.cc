#include "sls/evidence.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "sls/errors.h"

namespace sls {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kTotalConflict = 1e-12;
constexpr double kTieTolerance = 1e-12;
constexpr const char* kDsMode = "ds";

void CheckTrust(double trust, const char* name) {
  if (!(trust > 0.0 && trust <= 1.0)) {
    throw ConfigError(std::string(name) + " must be in (0, 1], got " + std::to_string(trust));
  }
}

}  // namespace

Frame::Frame(std::vector<SpeedLimit> hypotheses) : hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) throw FrameError("frame of discernment is empty");
  if (hypotheses_.size() > kMaxHypotheses) {
    throw FrameError("frame of discernment holds " + std::to_string(hypotheses_.size()) +
                     " hypotheses, at most " + std::to_string(kMaxHypotheses) + " allowed");
  }
  for (SpeedLimit h : hypotheses_) {
    if (h.unknown()) throw FrameError("frame of discernment cannot contain unknown");
  }
  std::sort(hypotheses_.begin(), hypotheses_.end(),
            [](SpeedLimit a, SpeedLimit b) { return a.IsBelow(b); });
  if (std::adjacent_find(hypotheses_.begin(), hypotheses_.end()) != hypotheses_.end()) {
    throw FrameError("frame of discernment contains duplicate hypotheses");
  }
}

std::optional<Frame> Frame::FromReadings(const std::vector<SensorEvent>& events) {
  std::vector<SpeedLimit> limits;
  for (const SensorEvent& event : events) {
    SpeedLimit limit;
    if (const auto* vision = std::get_if<VisionEvent>(&event.payload)) limit = vision->limit;
    if (const auto* carto = std::get_if<CartoEvent>(&event.payload)) limit = carto->limit;
    if (limit.known() && std::find(limits.begin(), limits.end(), limit) == limits.end()) {
      limits.push_back(limit);
    }
  }
  if (limits.empty()) return std::nullopt;
  return Frame(std::move(limits));
}

std::size_t Frame::IndexOf(SpeedLimit limit) const {
  const auto it = std::find(hypotheses_.begin(), hypotheses_.end(), limit);
  if (it == hypotheses_.end()) {
    throw FrameError("speed limit " + limit.ToString() + " is not in the frame of discernment");
  }
  return static_cast<std::size_t>(it - hypotheses_.begin());
}

bool Frame::Contains(SpeedLimit limit) const {
  return std::find(hypotheses_.begin(), hypotheses_.end(), limit) != hypotheses_.end();
}

MassFunction MassFunction::Vacuous(const Frame& frame) {
  return MassFunction(frame, {{frame.full(), 1.0}});
}

MassFunction::MassFunction(Frame frame, std::map<HypothesisSet, double> masses)
    : frame_(std::move(frame)) {
  double sum = 0.0;
  for (const auto& [subset, weight] : masses) {
    if (subset == 0 || (subset & ~frame_.full()) != 0) {
      throw FrameError("focal element " + std::to_string(subset) + " is not a non-empty subset "
                       "of the frame");
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw ConfigError("mass weights must be finite and non-negative");
    }
    if (weight > 0.0) masses_.emplace(subset, weight);
    sum += weight;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ConfigError("mass weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

double MassFunction::mass(HypothesisSet subset) const {
  const auto it = masses_.find(subset);
  return it == masses_.end() ? 0.0 : it->second;
}

double MassFunction::total() const {
  double sum = 0.0;
  for (const auto& [subset, weight] : masses_) sum += weight;
  return sum;
}

void ReliabilityModel::Validate() const {
  CheckTrust(vision_trust, "vision_trust");
  CheckTrust(carto_trust, "carto_trust");
}

MassFunction MassFromReading(const Frame& frame, SpeedLimit reading, double trust) {
  CheckTrust(trust, "trust");
  if (reading.unknown()) return MassFunction::Vacuous(frame);
  const HypothesisSet singleton = frame.Singleton(reading);
  std::map<HypothesisSet, double> masses{{singleton, trust}};
  if (singleton != frame.full()) {
    masses[frame.full()] += 1.0 - trust;
  } else {
    masses[singleton] = 1.0;
  }
  return MassFunction(frame, std::move(masses));
}

MassFunction Combine(const MassFunction& a, const MassFunction& b) {
  if (!(a.frame() == b.frame())) {
    throw FrameError("cannot combine mass functions over different frames");
  }
  std::map<HypothesisSet, double> joint;
  double conflict = 0.0;
  for (const auto& [left, left_mass] : a.focal()) {
    for (const auto& [right, right_mass] : b.focal()) {
      const double product = left_mass * right_mass;
      const HypothesisSet intersection = left & right;
      if (intersection == 0) {
        conflict += product;
      } else {
        joint[intersection] += product;
      }
    }
  }
  const double normalizer = 1.0 - conflict;
  if (normalizer <= kTotalConflict) {
    throw ConflictError("total conflict between mass functions (K = " +
                        std::to_string(conflict) + ")");
  }
  for (auto& [subset, weight] : joint) weight /= normalizer;
  return MassFunction(a.frame(), std::move(joint));
}

double Plausibility(const MassFunction& m, HypothesisSet subset) {
  double pl = 0.0;
  for (const auto& [focal, weight] : m.focal()) {
    if ((focal & subset) != 0) pl += weight;
  }
  return std::min(pl, 1.0);
}

double Plausibility(const MassFunction& m, SpeedLimit hypothesis) {
  return Plausibility(m, m.frame().Singleton(hypothesis));
}

SpeedLimit DsDecide(SpeedLimit vision, SpeedLimit carto, const Frame& frame,
                    const ReliabilityModel& reliability) {
  reliability.Validate();
  const MassFunction vision_mass = MassFromReading(frame, vision, reliability.vision_trust);
  const MassFunction carto_mass = MassFromReading(frame, carto, reliability.carto_trust);
  if (vision.unknown() && carto.unknown()) return SpeedLimit::Unknown();

  const MassFunction fused = Combine(vision_mass, carto_mass);
  SpeedLimit best;
  double best_pl = -1.0;
  // Ascending frame order plus a strict comparison keeps the lower limit on ties.
  for (SpeedLimit h : frame.hypotheses()) {
    const double pl = Plausibility(fused, h);
    if (pl > best_pl + kTieTolerance) {
      best = h;
      best_pl = pl;
    }
  }
  return best;
}

Trace DsRun(const std::vector<SensorEvent>& events, const Frame& frame,
            const ReliabilityModel& reliability) {
  reliability.Validate();
  Trace trace;
  trace.reserve(events.size());
  SpeedLimit vision;
  SpeedLimit carto;
  for (const SensorEvent& event : events) {
    sls::Validate(event);
    if (const auto* v = std::get_if<VisionEvent>(&event.payload)) vision = v->limit;
    if (const auto* c = std::get_if<CartoEvent>(&event.payload)) carto = c->limit;
    trace.push_back(TraceRow{
        .t = event.t,
        .event = std::string(EventKind(event.payload)),
        .detail = EventDetail(event.payload),
        .mode_before = kDsMode,
        .mode_after = kDsMode,
        .validated = DsDecide(vision, carto, frame, reliability).ToString(),
    });
  }
  return trace;
}

Trace DsRun(const std::vector<SensorEvent>& events, const ReliabilityModel& reliability) {
  if (std::optional<Frame> frame = Frame::FromReadings(events)) {
    return DsRun(events, *frame, reliability);
  }
  reliability.Validate();
  Trace trace;
  for (const SensorEvent& event : events) {
    sls::Validate(event);
    trace.push_back(TraceRow{event.t, std::string(EventKind(event.payload)),
                             EventDetail(event.payload), kDsMode, kDsMode,
                             SpeedLimit::Unknown().ToString()});
  }
  return trace;
}

}  // namespace sls

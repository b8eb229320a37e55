#include "sls/scenario.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "overloaded.h"
#include "sls/errors.h"
#include "sls/random.h"

namespace sls {
namespace {

using internal::Overloaded;

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> Tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    if (line[pos] == ' ' || line[pos] == '\t') {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    tokens.push_back({line.substr(start, pos - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

class LineParser {
 public:
  LineParser(int line_no, std::vector<Token> tokens)
      : line_no_(line_no), tokens_(std::move(tokens)) {}

  [[noreturn]] void Fail(const Token& token, const std::string& message) const {
    throw ParseError(line_no_, token.column, message);
  }

  TimeMs ParseTime(const Token& token) const {
    const std::string_view digits = token.text.substr(2);
    TimeMs t = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
      Fail(token, "malformed timestamp '" + std::string(token.text) + "'");
    }
    if (t < 0) Fail(token, "timestamp must be non-negative");
    return t;
  }

  // key=value attributes after the keyword, keyed by name.
  std::map<std::string_view, Token> Attributes(std::initializer_list<std::string_view> allowed) {
    std::map<std::string_view, Token> attributes;
    for (std::size_t i = 2; i < tokens_.size(); ++i) {
      const Token& token = tokens_[i];
      const std::size_t eq = token.text.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        Fail(token, "expected key=value, got '" + std::string(token.text) + "'");
      }
      const std::string_view key = token.text.substr(0, eq);
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Fail(token, "unknown attribute '" + std::string(key) + "' for " +
                        std::string(tokens_[1].text));
      }
      const Token value{token.text.substr(eq + 1), token.column + static_cast<int>(eq) + 1};
      if (!attributes.emplace(key, value).second) {
        Fail(token, "duplicate attribute '" + std::string(key) + "'");
      }
    }
    return attributes;
  }

  const Token& Require(const std::map<std::string_view, Token>& attributes,
                       std::string_view key) const {
    const auto it = attributes.find(key);
    if (it == attributes.end()) {
      Fail(tokens_[1], std::string(tokens_[1].text) + " requires attribute '" +
                           std::string(key) + "'");
    }
    return it->second;
  }

  SpeedLimit Limit(const Token& value) const {
    if (std::optional<SpeedLimit> limit = SpeedLimit::Parse(value.text)) return *limit;
    long long number = 0;
    auto [ptr, ec] =
        std::from_chars(value.text.data(), value.text.data() + value.text.size(), number);
    if (!value.text.empty() && ec == std::errc() && ptr == value.text.data() + value.text.size()) {
      Fail(value, "speed limit " + std::string(value.text) +
                      " is not a multiple of 5 between 5 and 130");
    }
    Fail(value, "malformed speed limit '" + std::string(value.text) + "'");
  }

  template <class Enum>
  Enum Choice(const Token& value,
              std::initializer_list<std::pair<std::string_view, Enum>> choices) const {
    std::string expected;
    for (const auto& [name, e] : choices) {
      if (value.text == name) return e;
      expected += expected.empty() ? "" : "|";
      expected += name;
    }
    Fail(value, "expected one of " + expected + ", got '" + std::string(value.text) + "'");
  }

  SensorEvent Event() {
    const TimeMs t = ParseTime(tokens_[0]);
    if (tokens_.size() < 2) Fail(tokens_[0], "missing event keyword after timestamp");
    const Token& keyword = tokens_[1];

    if (keyword.text == "VISION") {
      const auto attrs = Attributes({"limit", "sub", "side"});
      VisionEvent vision{.limit = Limit(Require(attrs, "limit"))};
      if (const auto it = attrs.find("sub"); it != attrs.end()) {
        vision.sub_sign = Choice<SubSign>(it->second, {{"none", SubSign::kNone},
                                                        {"exit_arrow", SubSign::kExitArrow},
                                                        {"end_of_limit", SubSign::kEndOfLimit},
                                                        {"vehicle_class", SubSign::kVehicleClass},
                                                        {"weather", SubSign::kWeather}});
      }
      if (const auto it = attrs.find("side"); it != attrs.end()) {
        vision.side = Choice<Side>(it->second, {{"left", Side::kLeft}, {"right", Side::kRight}});
      }
      if (vision.limit.unknown() && vision.sub_sign != SubSign::kEndOfLimit) {
        Fail(attrs.at("limit"), "only end_of_limit signs may carry an unknown limit");
      }
      return {t, vision};
    }
    if (keyword.text == "CARTO") {
      const auto attrs = Attributes({"limit", "ambiguous"});
      CartoEvent carto{.limit = Limit(Require(attrs, "limit"))};
      if (const auto it = attrs.find("ambiguous"); it != attrs.end()) {
        carto.ambiguous = Choice<bool>(it->second, {{"0", false}, {"1", true}});
      }
      return {t, carto};
    }
    if (keyword.text == "LANE_CHANGE") {
      const auto attrs = Attributes({"dir"});
      return {t, LaneChangeEvent{Choice<Side>(Require(attrs, "dir"),
                                              {{"left", Side::kLeft}, {"right", Side::kRight}})}};
    }
    if (keyword.text == "TRUTH") {
      const auto attrs = Attributes({"limit"});
      return {t, TruthAnnotation{Limit(Require(attrs, "limit"))}};
    }
    Fail(keyword, "unknown event keyword '" + std::string(keyword.text) + "'");
  }

  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  int line_no_;
  std::vector<Token> tokens_;
};

std::string_view StripComment(std::string_view line) {
  if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Scenario ParseScenario(std::string_view text) {
  Scenario scenario;
  bool named = false;
  int line_no = 0;
  std::vector<SensorEvent> events;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    LineParser parser(line_no, Tokenize(StripComment(raw)));
    const std::vector<Token>& tokens = parser.tokens();
    if (tokens.empty()) continue;
    if (tokens[0].text == "SCENARIO") {
      if (named) parser.Fail(tokens[0], "duplicate SCENARIO declaration");
      if (tokens.size() != 2) parser.Fail(tokens[0], "expected 'SCENARIO <name>'");
      scenario.name = std::string(tokens[1].text);
      named = true;
    } else if (tokens[0].text.starts_with("T=")) {
      events.push_back(parser.Event());
    } else {
      parser.Fail(tokens[0], "expected SCENARIO or T=<ms>, got '" +
                                 std::string(tokens[0].text) + "'");
    }
  }
  scenario.events = OrderEvents(std::move(events));
  return scenario;
}

std::string FormatScenario(const Scenario& scenario) {
  std::string out = "SCENARIO " + scenario.name + "\n";
  for (const SensorEvent& event : scenario.events) {
    out += "T=" + std::to_string(event.t) + " ";
    out += std::visit(
        Overloaded{
            [](const VisionEvent& e) {
              return "VISION limit=" + e.limit.ToString() + " sub=" +
                     std::string(ToString(e.sub_sign)) + " side=" + std::string(ToString(e.side));
            },
            [](const CartoEvent& e) {
              return "CARTO limit=" + e.limit.ToString() + " ambiguous=" +
                     (e.ambiguous ? "1" : "0");
            },
            [](const LaneChangeEvent& e) {
              return "LANE_CHANGE dir=" + std::string(ToString(e.direction));
            },
            [](const TruthAnnotation& e) { return "TRUTH limit=" + e.limit.ToString(); },
        },
        event.payload);
    out += '\n';
  }
  return out;
}

void NoiseModel::Validate() const {
  const auto check = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string(name) + " must be a probability in [0, 1], got " +
                        std::to_string(p));
    }
  };
  check(miss_main, "miss_main");
  check(miss_sub, "miss_sub");
}

Scenario InjectNoise(const Scenario& scenario, const NoiseModel& noise) {
  noise.Validate();
  Scenario noisy{.name = scenario.name, .events = {}};
  noisy.events.reserve(scenario.events.size());
  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    SensorEvent event = scenario.events[i];
    if (auto* vision = std::get_if<VisionEvent>(&event.payload)) {
      const double u = ToUnitInterval(SplitMix64At(noise.seed, i));
      if (vision->sub_sign == SubSign::kNone && u < noise.miss_main) continue;
      if (vision->sub_sign == SubSign::kExitArrow && u < noise.miss_sub) {
        vision->sub_sign = SubSign::kNone;
      }
    }
    noisy.events.push_back(std::move(event));
  }
  return noisy;
}

}  // namespace sls

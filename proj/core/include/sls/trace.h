#pragma once

#include <string>
#include <vector>

#include "sls/events.h"

namespace sls {

// One engine output per processed event.
struct TraceRow {
  TimeMs t = 0;
  std::string event;
  std::string detail;
  std::string mode_before;
  std::string mode_after;
  std::string validated;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

using Trace = std::vector<TraceRow>;

inline constexpr const char* kTraceHeader = "t_ms,event,detail,mode_before,mode_after,validated";

// CSV with kTraceHeader, LF line endings, one line per row.
std::string WriteTrace(const Trace& trace);

}  // namespace sls

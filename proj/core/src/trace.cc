#include "sls/trace.h"

namespace sls {

std::string WriteTrace(const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRow& row : trace) {
    out += std::to_string(row.t);
    for (const std::string* field :
         {&row.event, &row.detail, &row.mode_before, &row.mode_after, &row.validated}) {
      out += ',';
      out += *field;
    }
    out += '\n';
  }
  return out;
}

}  // namespace sls

#include "vlab/cli/report.hpp"

#include <algorithm>
#include <cstdio>

#include "vlab/errors.hpp"

namespace vlab::cli {

bool ReportTable::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::vector<std::string> ReportTable::failing() const {
  std::vector<std::string> ids;
  for (const auto& r : rows)
    if (!r.pass) ids.push_back(r.id);
  return ids;
}

std::string ReportTable::format() const {
  std::size_t w = 9;
  for (const auto& r : rows) w = std::max(w, r.id.size());
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-6s  %-12s  %s\n", static_cast<int>(w), "criterion", "result", "source",
                "detail");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-6s  %-12s  %s\n", static_cast<int>(w), r.id.c_str(),
                  r.pass ? "PASS" : "FAIL", r.source.c_str(), r.detail.c_str());
    out += buf;
  }
  return out;
}

ReportTable emit_report(const std::vector<Manifest>& manifests) {
  if (manifests.empty()) throw NotFoundError("no manifests to report on");
  ReportTable t;
  for (const auto& m : manifests)
    for (const auto& c : m.criteria) {
      auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const ReportRow& r) { return r.id == c.id; });
      ReportRow row{c.id, c.pass, m.kind, c.detail};
      if (it == t.rows.end())
        t.rows.push_back(std::move(row));
      else
        *it = std::move(row);
    }
  std::sort(t.rows.begin(), t.rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.id < b.id; });
  return t;
}

}  // namespace vlab::cli

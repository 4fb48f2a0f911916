#pragma once

#include <string>
#include <vector>

#include "vlab/cli/experiment.hpp"

namespace vlab::cli {

struct ReportRow {
  std::string id;
  bool pass = false;
  std::string source;  // manifest kind
  std::string detail;
};

struct ReportTable {
  std::vector<ReportRow> rows;

  bool all_pass() const;
  std::vector<std::string> failing() const;
  std::string format() const;
};

// Later manifests override earlier rows with the same criterion id.
ReportTable emit_report(const std::vector<Manifest>& manifests);

}  // namespace vlab::cli

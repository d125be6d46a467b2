#pragma once

#include <string>
#include <vector>

#include "chtumor/config.hpp"

namespace chtumor {

struct RunOutcome {
  std::vector<std::string> artifacts;  // files written, in write order
  std::string status_json;             // one-line summary for stdout
};

// Executes the finalized config's command and writes its artifacts into
// out_dir (created if missing). Every run writes effective_config.ini;
// the command adds its JSON/CSV outputs per cfg.format. Throws on solver
// or I/O failure.
RunOutcome run_command(const RunConfig& cfg, const std::string& out_dir);

}  // namespace chtumor

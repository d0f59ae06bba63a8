#pragma once

#include <string>
#include <vector>

#include "becsim/config.hpp"

namespace becsim {

struct RunResult {
  std::vector<std::string> outputs;  // paths written, manifest.json last
};

// Executes one subcommand: builds what it needs, writes the pinned CSV
// layouts plus manifest.json into config.out_dir, and returns the written
// paths. Identical inputs give byte-identical outputs at any thread count.
RunResult run(const RunConfig& config, const std::string& subcommand);

}  // namespace becsim

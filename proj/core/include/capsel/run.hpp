#pragma once

#include <string>

#include "capsel/config.hpp"

namespace capsel::run {

// Executes one CLI command ("signs", "train", "predict", "eval",
// "sweep-unlabeled", "sweep-k", "transfer", "similarity") against a
// validated config. Artifacts land in cfg.out_dir; every artifact embeds
// the config hash and seed. Timestamps appear only in the run.log sidecar.
// On failure partially written artifacts are removed and the error rethrown.
int run_command(const std::string& command, const config::RunConfig& cfg);

}  // namespace capsel::run

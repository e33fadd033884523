#pragma once

#include <optional>
#include <string>

#include "finsent/run_config.hpp"

namespace finsent::cli {

// Subcommand implementations behind the CLI binary, callable directly from
// tests. Each validates its inputs up front (validation_error), runs to
// completion and writes its outputs plus a resolved-config snapshot under
// output_dir.

void cmd_train(RunConfig cfg);
void cmd_predict(RunConfig cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_cv(RunConfig cfg);
void cmd_ablate(RunConfig cfg);

// Exit-code mapping used by the binary: 0 success, 2 validation error,
// 3 runtime/numerical error.
int run_command(const std::string& name, RunConfig cfg);

}  // namespace finsent::cli

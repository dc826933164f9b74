#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldf/parallel.hpp"

namespace ldf {

// Overrides applied on top of the config file (CLI flags).
struct RunOverrides {
  std::optional<std::string> output_dir;
  std::vector<std::uint64_t> seeds;  // replaces the config seed list if set
  std::optional<int> threads;
};

// Runs the experiment described by the JSON config at config_path and writes
// the report files into its output directory. Deterministic given config and
// seeds; on failure, files written by this run are removed before the error
// propagates. Returns the list of files written.
std::vector<std::string> run_experiment(const std::string& config_path,
                                        const RunOverrides& overrides = {});

// Same, but also verifies the config's experiment kind (used by the CLI so
// a subcommand rejects a config written for a different one).
std::vector<std::string> run_experiment_checked(const std::string& config_path,
                                                const std::string& expected_kind,
                                                const RunOverrides& overrides = {});

// Recomputes the summary table of an experiment output directory from the
// emitted per-method score series. With check = true, verifies that the
// existing summary.csv matches byte for byte and throws on mismatch;
// otherwise rewrites it.
void report_summary(const std::string& output_dir, bool check);

}  // namespace ldf

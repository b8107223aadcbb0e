#pragma once

#include <string>

#include "rsb/cli/config.hpp"
#include "rsb/verify/verify.hpp"

namespace rsb::cli {

// Executes one configured command, writing artifacts under cfg.out_dir:
// config.resolved, results/*.csv, reports/*.json, disorder/*.json.
// Returns 0 when every requested check passes, 1 otherwise. Invalid-config
// and cap conditions surface as exceptions (mapped to exit codes in main).
int run(const RunConfig& cfg);

// Whitespace-delimited scan data for plotting: '#' comment header plus one
// row per point. When the scan carries a log-log fit a companion file
// <path>.fit is written; otherwise a warning goes to stderr.
void emit_plot_data(const verify::ScanResult& scan, const std::string& path);

} // namespace rsb::cli

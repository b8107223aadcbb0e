#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsb/core/params.hpp"

namespace rsb::cli {

// Resolved run configuration. The on-disk format is a flat key=value file
// with [section] headers; unknown sections or keys are rejected. Every run
// echoes its fully resolved configuration to <out>/config.resolved, which
// parses back to an equivalent RunConfig.
struct RunConfig {
    std::string command; // ed-check, trotter-scan, mc-run, fkg-check,
                         // bound-check, gg-check, scan
    ModelParams params;

    struct {
        int count = 1;
        std::uint64_t master_seed = 1;
    } ensemble;

    struct {
        int replicas = 2;
        std::int64_t sweeps = 12000;
        std::int64_t thermalization = -1; // -1: default policy
        int interval = 1;
    } mc;

    struct {
        std::int64_t dim_cap = 4096;
        int enum_bits = 22;
    } caps;

    std::string out_dir = "out";
    int workers = 1;

    std::vector<int> m_list = {2, 4, 8, 16};                 // trotter-scan
    std::vector<int> l_list = {2, 3, 4};                     // scan
    std::string scan_target = "psi";                         // scan
    int gg_n = 2;                                            // gg-check
    int gg_component = 3;                                    // gg-check
    bool gg_trivial = false;                                 // gg-check
    std::vector<std::string> fkg_modes = {"truncated_pair", "monotonicity_classical",
                                          "monotonicity_spectral"};

    void validate() const;
    void scan_target_check() const;
};

RunConfig parse_config_file(const std::string& path);

struct Overrides {
    std::optional<std::string> command;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov);

std::string render_config(const RunConfig& cfg);
void write_resolved(const RunConfig& cfg, const std::string& path);

} // namespace rsb::cli

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsb/core/lattice.hpp"
#include "rsb/core/params.hpp"

namespace rsb {

// One quenched sample of all Gaussian random fields, in lattice enumeration
// order. g1/g3 live on spatial sites, h1/h3 on spacetime sites.
struct DisorderRealization {
    std::uint64_t seed = 0;
    std::string generator_id;
    int d = 1;
    int L = 1;
    int M = 1;
    std::vector<double> g1;
    std::vector<double> g3;
    std::vector<double> h1;
    std::vector<double> h3;

    bool operator==(const DisorderRealization&) const = default;
};

// Deterministic: the draw order is g1 (sites), g3 (sites), h1 (spacetime),
// h3 (spacetime), one stream seeded by `seed`.
DisorderRealization sample_disorder(const ModelParams& p, std::uint64_t seed);

// Versioned JSON with every double rendered as a 17-significant-digit
// decimal string, so load(save(r)) == r bit-exactly.
void save_realization(const DisorderRealization& r, const std::string& path);
DisorderRealization load_realization(const std::string& path);

// Guard for reusing a persisted realization in a differently-shaped run.
void require_shape(const DisorderRealization& r, const ModelParams& p);

// Shared helpers for lossless double <-> text.
std::string format_double17(double v);
double parse_double17(const std::string& s);

} // namespace rsb

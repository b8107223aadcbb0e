#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rsb/core/params.hpp"

namespace rsb {

// Open-boundary cubic lattice [1,L]^d. Sites are enumerated in lexicographic
// order of (x1,...,xd) with the last coordinate varying fastest; this order
// is the canonical one for every array indexed by site. Unused coordinates
// of a site are fixed to 1.
struct QuantumLattice {
    int d = 1;
    int L = 1;
    std::vector<std::array<int, 3>> sites;
    std::vector<std::pair<std::int32_t, std::int32_t>> bonds; // nearest neighbours, first < second

    int n_sites() const { return static_cast<int>(sites.size()); }
    int site_index(const std::array<int, 3>& x) const;
};

QuantumLattice build_lattice(const ModelParams& p);

// V_L x T_M with free spatial and periodic temporal boundary. Spacetime
// index w = site*M + (t-1) for t in [1,M], so each site's time line is
// contiguous.
struct SpacetimeLattice {
    QuantumLattice base;
    int M = 1;

    int n_sites() const { return base.n_sites() * M; }
    int index(int site, int t) const { return site * M + (t - 1); }
    int site_of(int w) const { return w / M; }
    int slice_of(int w) const { return w % M + 1; } // t in [1,M]

    int time_next(int w) const {
        int tau = w % M;
        return w - tau + (tau + 1) % M;
    }
    int time_prev(int w) const {
        int tau = w % M;
        return w - tau + (tau + M - 1) % M;
    }
};

SpacetimeLattice build_spacetime_lattice(const ModelParams& p);

} // namespace rsb

#include "rsb/core/lattice.hpp"

#include <cmath>
#include <cstdlib>

#include "rsb/core/error.hpp"

namespace rsb {

int QuantumLattice::site_index(const std::array<int, 3>& x) const {
    int idx = 0;
    for (int k = 0; k < d; ++k) idx = idx * L + (x[k] - 1);
    return idx;
}

QuantumLattice build_lattice(const ModelParams& p) {
    p.validate();
    QuantumLattice lat;
    lat.d = p.d;
    lat.L = p.L;

    const std::int64_t n = p.n_sites();
    lat.sites.reserve(static_cast<std::size_t>(n));
    std::array<int, 3> x{1, 1, 1};
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t rem = i;
        for (int k = p.d - 1; k >= 0; --k) {
            x[k] = 1 + static_cast<int>(rem % p.L);
            rem /= p.L;
        }
        lat.sites.push_back(x);
    }

    // Each bond once, from the site with the smaller coordinate.
    for (std::int64_t i = 0; i < n; ++i) {
        for (int k = 0; k < p.d; ++k) {
            if (lat.sites[i][k] < p.L) {
                std::array<int, 3> y = lat.sites[i];
                y[k] += 1;
                lat.bonds.emplace_back(static_cast<std::int32_t>(i),
                                       static_cast<std::int32_t>(lat.site_index(y)));
            }
        }
    }
    return lat;
}

SpacetimeLattice build_spacetime_lattice(const ModelParams& p) {
    SpacetimeLattice w;
    w.base = build_lattice(p);
    w.M = p.M;
    return w;
}

} // namespace rsb

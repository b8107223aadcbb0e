#include "rsb/core/params.hpp"

#include <string>

#include "rsb/core/error.hpp"

namespace rsb {

void ModelParams::validate() const {
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0, got " + std::to_string(beta));
    if (d < 1 || d > 3) throw ConfigError("d must be 1, 2 or 3, got " + std::to_string(d));
    if (L < 1) throw ConfigError("L must be >= 1, got " + std::to_string(L));
    if (M < 1) throw ConfigError("M must be >= 1, got " + std::to_string(M));
}

std::int64_t ModelParams::n_sites() const {
    std::int64_t n = 1;
    for (int k = 0; k < d; ++k) n *= L;
    return n;
}

std::int64_t ModelParams::n_spacetime() const { return n_sites() * M; }

} // namespace rsb

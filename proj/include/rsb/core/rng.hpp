#pragma once

#include <cstdint>
#include <random>

namespace rsb {

// Child seed derivation: one splitmix64 step of master advanced by
// (stream+1) increments. Every independent random stream in the project
// (disorder sample, MC replica, ensemble member) is derived this way from
// one master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Canonical uniform in [0,1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1p-53;
}

// Deterministic standard-normal stream: mt19937_64 uniforms mapped through
// the Acklam rational approximation of the inverse normal CDF. One uniform
// per draw, u = ((bits>>11)+0.5)*2^-53 in (0,1). The generator_id tag pins
// this exact scheme so persisted realizations carry their provenance.
class GaussianStream {
public:
    static constexpr const char* kGeneratorId = "mt19937_64/acklam-icdf/v1";

    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        double u = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1p-53;
        return inverse_normal_cdf(u);
    }

    // Acklam's algorithm, |relative error| < 1.2e-9 over (0,1).
    static double inverse_normal_cdf(double p);

private:
    std::mt19937_64 rng_;
};

} // namespace rsb

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rsb {

// Spin configuration on the spacetime lattice, values exactly -1 or +1,
// indexed by the spacetime enumeration (site-major, time fastest).
struct SpinConfiguration {
    std::vector<std::int8_t> values;

    std::size_t size() const { return values.size(); }

    static SpinConfiguration all_up(std::size_t n) {
        SpinConfiguration s;
        s.values.assign(n, std::int8_t{1});
        return s;
    }

    static SpinConfiguration random(std::size_t n, std::mt19937_64& rng) {
        SpinConfiguration s;
        s.values.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            s.values[i] = (rng() & 1u) ? std::int8_t{1} : std::int8_t{-1};
        return s;
    }

    bool is_valid() const {
        for (auto v : values)
            if (v != 1 && v != -1) return false;
        return true;
    }
};

} // namespace rsb

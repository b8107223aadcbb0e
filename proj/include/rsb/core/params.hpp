#pragma once

#include <cstdint>

namespace rsb {

// Couplings and geometry of one model instance.
//
//   H = -sum_x J1 g1_x S1_x - sum_<xy> S3_x S3_y - sum_x (J3 g3_x + c) S3_x
//
// b1 and b3 are the strengths of the perturbing random fields of the
// artificial (d+1)-dimensional model; they vanish in the physical model.
struct ModelParams {
    double beta = 1.0; // inverse temperature, >= 0
    double J1 = 1.0;   // transverse disorder strength
    double J3 = 1.0;   // longitudinal disorder strength
    double c = 0.0;    // uniform longitudinal field
    double b1 = 0.0;   // transverse perturbation strength
    double b3 = 0.0;   // longitudinal perturbation strength
    int d = 1;         // spatial dimension, 1..3
    int L = 1;         // linear size, >= 1
    int M = 1;         // Trotter slices, >= 1

    // Throws ConfigError on violation. beta == 0 is admitted here (it is a
    // well-defined quantum Gibbs state); paths that cannot realize it, such
    // as the Trotter compile, reject it themselves.
    void validate() const;

    std::int64_t n_sites() const;     // L^d
    std::int64_t n_spacetime() const; // L^d * M
};

} // namespace rsb

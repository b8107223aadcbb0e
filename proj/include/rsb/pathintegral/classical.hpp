#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsb/core/disorder.hpp"
#include "rsb/core/lattice.hpp"
#include "rsb/core/params.hpp"
#include "rsb/core/spins.hpp"

namespace rsb::pathintegral {

// The (d+1)-dimensional classical Ising system equivalent to the quantum
// model at M Trotter slices:
//
//   H_W(sigma) = - sum_t [ (1/4M) sum_<xy> sigma_{x,t} sigma_{y,t}
//                          + sum_x K_{x,t} sigma_{x,t} sigma_{x,t+1} ]
//                - sum_{x,t} field_{x,t} sigma_{x,t}
//
// with tanh(beta K_{x,t}) = exp(-beta |J1 g1_x + b1 h1_{x,t}| / M),
// field_{x,t} = (J3 g3_x + b3 sqrt(M) h3_{x,t} + c) / (2M), and the
// configuration-independent weight C_W kept in log space.
//
// Negative transverse coefficients are gauged away through the absolute
// value (a pi-rotation about the 3-axis, spectrum preserving). All pair
// couplings are therefore >= 0. At M = 1 the temporal bond is a self-loop:
// a constant energy offset K per site, excluded from local fields.
struct ClassicalModel {
    SpacetimeLattice lattice;
    double beta = 1.0;
    double spatial_coupling = 0.0;         // 1/(4M)
    std::vector<double> temporal_coupling; // K at w = link (x,t)->(x,t+1)
    std::vector<double> site_field;        // per spacetime site
    double log_weight = 0.0;               // log C_W

    // spacetime bonds within each slice, and per-site spatial adjacency (CSR)
    std::vector<std::pair<std::int32_t, std::int32_t>> spatial_bonds;
    std::vector<std::int32_t> adj;
    std::vector<std::int32_t> adj_offset;

    int n_spacetime() const { return lattice.n_sites(); }
};

ClassicalModel compile(const ModelParams& p, const DisorderRealization& dis);

double classical_energy(const ClassicalModel& m, const SpinConfiguration& s);

// phi_w such that flipping sigma_w changes the energy by 2 sigma_w phi_w.
double local_field(const ClassicalModel& m, const SpinConfiguration& s, int w);

struct ClassicalExact {
    double log_z = 0.0;                // excludes log_weight
    std::vector<double> magnetization; // <sigma_w>
    Eigen::MatrixXd pair;              // <sigma_w sigma_z>, filled when with_pair
    bool has_pair = false;
};

// Exact sums by full 2^|W| enumeration (Gray-code walk).
ClassicalExact exact_classical_sum(const ClassicalModel& m, double beta, bool with_pair = true,
                                   int cap_bits = 22);

// Relative errors |C_W Z_cl(M) - Z_quantum| / Z_quantum for each M in
// m_list; requires b1 = b3 = 0.
std::vector<double> trotter_gap(const ModelParams& p, const DisorderRealization& dis,
                                std::span<const int> m_list,
                                std::int64_t dim_cap = 4096, int enum_cap_bits = 22);

// Same JSON envelope as disorder realizations (versioned, 17-digit decimal
// strings, arrays in enumeration order).
void save_classical_model(const ClassicalModel& m, const ModelParams& p, const std::string& path);
ClassicalModel load_classical_model(const std::string& path, ModelParams* params_out = nullptr);

} // namespace rsb::pathintegral

#pragma once

#include <cstdint>
#include <Eigen/Dense>

#include "rsb/core/disorder.hpp"
#include "rsb/core/lattice.hpp"
#include "rsb/core/params.hpp"

namespace rsb::spectral {

// Dense Hermitian operator on the 2^N product space. Basis state n has spin
// up at site k iff bit k of n is set (site order = lattice enumeration
// order); S3 is diagonal with eigenvalues +-1/2.
using Operator = Eigen::MatrixXcd;

inline constexpr std::int64_t kDefaultDimCap = 4096;

std::int64_t hilbert_dim(int n_sites, std::int64_t dim_cap = kDefaultDimCap);

// Spin-1/2 operator S^component at one site, component in {1,2,3}.
Operator spin_op(int component, int site, int n_sites);

enum class PerturbationMode {
    none,               // requires b1 == b3 == 0
    transverse_b1_only, // transverse coefficients gain b1 * (slice average of h1);
                        // requires b3 == 0 (the sqrt(M)-scaled b3 field has no
                        // static operator counterpart)
};

Operator build_hamiltonian(const ModelParams& p, const QuantumLattice& lat,
                           const DisorderRealization& dis,
                           PerturbationMode mode = PerturbationMode::none,
                           std::int64_t dim_cap = kDefaultDimCap);

// m_L^i = (1/|V|) sum_x S^i_x
Operator magnetization(int component, int n_sites, std::int64_t dim_cap = kDefaultDimCap);

Operator kron(const Operator& a, const Operator& b);

// H (x) 1 + 1 (x) H on the doubled (two-replica) space.
Operator replicate_hamiltonian(const Operator& h, std::int64_t dim_cap = kDefaultDimCap);

// R^i_{1,2} = (1/|V|) sum_x S^i_x (x) S^i_x on the doubled space.
Operator overlap_operator(int component, int n_sites, std::int64_t dim_cap = kDefaultDimCap);

bool is_hermitian(const Operator& op, double tol = 1e-12);

} // namespace rsb::spectral

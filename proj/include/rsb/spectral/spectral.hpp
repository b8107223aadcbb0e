#pragma once

#include <optional>
#include <vector>

#include "rsb/spectral/operators.hpp"

namespace rsb::spectral {

// Full eigensystem of a Hermitian Hamiltonian together with the Gibbs
// normalization at a fixed inverse temperature. Immutable after
// construction; all evaluations below are pure.
struct SpectralDecomposition {
    double beta = 0.0;
    Eigen::VectorXd energies; // ascending
    Eigen::MatrixXcd basis;   // columns are eigenvectors
    double log_z = 0.0;

    Eigen::VectorXd weights; // exp(-beta*(E_n - E_0))
    double weight_sum = 0.0; // Z * exp(beta*E_0)

    Eigen::Index dim() const { return energies.size(); }
};

SpectralDecomposition build_spectral(const Operator& h, double beta);

// (1/Z) Tr O exp(-beta H); requires Hermitian O (real result enforced to a
// 1e-10 imaginary residue).
double gibbs_expectation(const SpectralDecomposition& s, const Operator& o);

// Two-operator Duhamel product with the spectral kernel
//   W(E_m,E_n) = (e^{-beta E_m} - e^{-beta E_n}) / (beta (E_n - E_m)),
//   W(E,E) = e^{-beta E},
// normalized so that beta^2 (O1,O2)_D = (1/Z) d^2 Z / dx1 dx2 for
// Z(x) = Tr exp(-beta (H - x1 O1 - x2 O2)).
double duhamel_product(const SpectralDecomposition& s, const Operator& o1, const Operator& o2);

// The kernel itself, exposed for its continuity tests.
double duhamel_kernel_weight(double beta, double em, double en);

// O expressed in the eigenbasis, U^dagger O U.
Operator to_eigenbasis(const SpectralDecomposition& s, const Operator& o);

struct OverlapMoments {
    double mean = 0.0;                   // <R^i_{1,2}> = (1/|V|) sum_x <S^i_x>^2
    double second_gibbs = 0.0;           // <(R^i_{1,2})^2> = (1/|V|^2) sum_xy <S^i_x S^i_y>^2
    std::optional<double> second_duhamel; // (R,R)_D via the factorized tau quadrature
};

struct OverlapOptions {
    bool with_duhamel = true;
    int quadrature_nodes = 64;
    // When 4^N <= replica_check_cap the factorized (R,R)_D is cross-checked
    // against direct two-replica diagonalization; disagreement beyond 1e-8
    // is a hard error. 0 disables the check.
    std::int64_t replica_check_cap = 256;
};

OverlapMoments overlap_moments(const SpectralDecomposition& s, const ModelParams& p,
                               int component, const OverlapOptions& opt = {});

struct HarrisTriple {
    double lower = 0.0;  // (O,O)_D
    double middle = 0.0; // <O^2>
    double upper = 0.0;  // (O,O)_D + (beta/12) <[O,[H,O]]>
};

HarrisTriple harris_check(const SpectralDecomposition& s, const Operator& o);

// log Z / |V_L|
double free_energy_density(const SpectralDecomposition& s, const ModelParams& p);

// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& glweights);

} // namespace rsb::spectral

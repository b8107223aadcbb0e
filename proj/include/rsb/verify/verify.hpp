#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsb/core/disorder.hpp"
#include "rsb/core/params.hpp"
#include "rsb/pathintegral/classical.hpp"
#include "rsb/verify/trend.hpp"

namespace rsb::verify {

struct CheckReport {
    std::string check_id;
    int instances = 0;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false; // worst_violation <= tolerance
    std::string context;

    void finalize() { pass = worst_violation <= tolerance; }
};

// --- correlation inequalities (exact backends) ---------------------------

// <sigma_w ; sigma_z> >= 0 for every pair of spacetime sites, by full
// enumeration of the compiled ferromagnetic model.
CheckReport fkg_truncated_pair(const pathintegral::ClassicalModel& m, double beta,
                               double tol = 1e-12, int cap_bits = 22);

// d<S3_x>/dg3_y >= 0 for all (x,y) by central differences on the quantum
// side (step h, Richardson-checked at h/2). Monotone in +g3 for J3 > 0.
CheckReport fkg_monotonicity_spectral(const ModelParams& p, const DisorderRealization& dis,
                                      double step = 1e-4, double tol = 1e-6,
                                      std::int64_t dim_cap = 4096);

// d<sigma_w>/dg3_y >= 0 for all (w,y) on the compiled classical model
// (valid at b3 != 0 as well).
CheckReport fkg_monotonicity_classical(const ModelParams& p, const DisorderRealization& dis,
                                       double step = 1e-4, double tol = 1e-6, int cap_bits = 22);

// |<sigma_x sigma_y ; sigma_w sigma_z>| <= <(sigma_x+sigma_y);(sigma_w+sigma_z)>
// over all site quadruples (with repetition).
CheckReport check_four_point_bound(const pathintegral::ClassicalModel& m, double beta,
                                   double tol = 1e-12, int cap_bits = 14);

// --- Duhamel vs Gibbs sandwich on the overlap ----------------------------

struct DuhamelGibbsTriple {
    double duhamel = 0.0;         // (R,R)_D
    double gibbs = 0.0;           // <R^2>
    double commutator_term = 0.0; // (beta/12) <[R,[H,R]]>
};

DuhamelGibbsTriple duhamel_vs_gibbs_overlap(const ModelParams& p, const DisorderRealization& dis,
                                            int component, std::int64_t replica_dim_cap = 4096);

// --- Ghirlanda-Guerra residuals -------------------------------------------

struct McProtocol {
    std::int64_t sweeps = 12000;        // total, thermalization included
    std::int64_t thermalization = 2000; // < 0 selects the default policy
    int measure_interval = 2;
};

struct GgRealizationRow {
    std::uint64_t seed = 0;
    double rho_mean = 0.0;     // <rho_{a,b}>, pair-symmetrized
    double rho_sq = 0.0;       // <rho_{a,b}^2>, pair-symmetrized
    double rho_chain = 0.0;    // <rho_{a,b} rho_{a,c}>, symmetrized over shared replicas
    double rho_disjoint = 0.0; // <rho_{a,b} rho_{c,d}>, disjoint pairs (n = 3 only)
};

struct GgEstimate {
    double residual = 0.0;
    double error = 0.0;
    int n_realizations = 0;
    std::vector<GgRealizationRow> rows;
};

// n = 2: residual = 2 E<rho_12 rho_13> - (E<rho_12>)^2 - E<rho_12^2>
// n = 3: residual = 3 E<rho_23 rho_14> - (E<rho_12>)^2 - 2 E<rho_23 rho_12>
// Component i picks the perturbed Hamiltonian H_i(b): i = 3 uses b3 = p.b3,
// b1 = 0; i = 1 uses b1 = p.b1, b3 = 0. The relevant b must be nonzero.
// Error is the delete-1 jackknife over disorder realizations.
GgEstimate gg_residual(const ModelParams& p, int n, int component, int n_realizations,
                       std::uint64_t master_seed, const McProtocol& proto, int workers = 1);

// The n = 2, f = 1 relabeling identity evaluated through the same
// pair-exchangeable estimators; exactly zero unless the estimators are
// broken. Returns the per-realization residuals.
std::vector<double> gg_trivial_residuals(const ModelParams& p, int component, int n_realizations,
                                         std::uint64_t master_seed, const McProtocol& proto,
                                         int workers = 1);

// --- variance / self-averaging scans --------------------------------------

enum class ScanTarget {
    psi,               // Var(psi_L), psi_L = log Z / |V|
    mu3,               // E (delta m3, delta m3)_D
    overlap_total,     // E<(R3_12 - E<R3_12>)^2>
    overlap_gibbs_part // E[(R3,R3)_D - <R3_12>^2]
};

ScanTarget scan_target_from_string(const std::string& s);
std::string to_string(ScanTarget t);

struct ScanPoint {
    double axis = 0.0;
    double estimate = 0.0;
    double error = 0.0;
    int n_samples = 0;
};

struct ScanResult {
    std::string axis; // "L"
    ScanTarget target = ScanTarget::psi;
    std::vector<ScanPoint> points;
    std::optional<WlsFit> fit; // log-log fit, present when all estimates are
                               // positive at two sigma
};

// Exact-diagonalization ensemble scan over L at b1 = b3 = 0. Realization k
// at size L uses disorder seed split_seed(master_seed, k) so the same draws
// pair across sizes.
ScanResult variance_scan(const ModelParams& p, const std::vector<int>& l_list,
                         int n_realizations, std::uint64_t master_seed, ScanTarget target,
                         int workers = 1, std::int64_t dim_cap = 4096);

} // namespace rsb::verify

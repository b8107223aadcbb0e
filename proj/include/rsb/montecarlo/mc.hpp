#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rsb/core/disorder.hpp"
#include "rsb/core/spins.hpp"
#include "rsb/montecarlo/stats.hpp"
#include "rsb/pathintegral/classical.hpp"

namespace rsb::mc {

// n >= 2 replica configurations sharing one compiled model (same quenched
// disorder), each with its own RNG stream derived from
// split_seed(master_seed, 1 + replica_index).
struct ReplicaState {
    std::vector<SpinConfiguration> configs;
    std::vector<std::mt19937_64> rngs;
    std::int64_t sweep_count = 0;
};

ReplicaState init_replicas(const pathintegral::ClassicalModel& m, int n_replicas,
                           std::uint64_t master_seed);

// Single-site heat bath: sigma_w <- +1 with probability 1/(1+exp(-2 beta
// phi_w)), independent of the old value. Acceptance probabilities are
// tabulated per site over the finitely many neighbour states, which leaves
// the sampled chain bit-identical to evaluating the expression in place.
class HeatBath {
public:
    HeatBath(const pathintegral::ClassicalModel& m, double beta);

    // One lexicographic pass over all sites of one configuration.
    void sweep(SpinConfiguration& s, std::mt19937_64& rng) const;

    // Two half-passes over the even/odd (sum of coordinates + t) sublattices;
    // requires even M >= 2 so that the spacetime lattice is bipartite.
    void sweep_checkerboard(SpinConfiguration& s, std::mt19937_64& rng) const;

    double flip_up_probability(const SpinConfiguration& s, int w) const;

private:
    void update_site(SpinConfiguration& s, int w, std::mt19937_64& rng) const;

    const pathintegral::ClassicalModel* model_;
    double beta_;
    std::vector<double> prob_;        // flattened per-site tables
    std::vector<std::int32_t> base_;  // per-site offset into prob_
    std::vector<std::int32_t> parity_order_; // even sites then odd sites
    int n_even_ = 0;
    bool bipartite_ = false;
};

// One full pass per replica, lexicographic order.
void heat_bath_sweep(ReplicaState& state, const pathintegral::ClassicalModel& m, double beta);

struct PairOverlap {
    int a = 0, b = 1; // replica indices
    double rho1 = 0.0;
    double rho3 = 0.0;
};

// Exact evaluation of the overlap estimators on the current configurations,
// one entry per unordered replica pair.
std::vector<PairOverlap> measure_overlaps(const ReplicaState& state,
                                          const pathintegral::ClassicalModel& m);

struct FieldObservables {
    double mu1 = 0.0;  // kink density       (1/4|V|M) sum (1 - sigma sigma+)
    double mu3 = 0.0;  // magnetization      (1/2|V|M) sum sigma
    double h1L = 0.0;  // (1/4|V|sqrt(M)) sum h1 (1 - sigma sigma+)
    double h3L = 0.0;  // (1/2|V|sqrt(M)) sum h3 sigma
};

// Replica-averaged instantaneous values.
FieldObservables measure_fields(const ReplicaState& state, const DisorderRealization& dis);

struct ExperimentMetadata {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> replica_seeds;
    int n_replicas = 0;
    std::int64_t sweeps = 0;
    std::int64_t thermalization_used = 0;
    int measure_interval = 1;
    double tau_int_mu3 = 0.0;
    int bin_width_mu3 = 1;
};

struct ExperimentResult {
    std::vector<ObservableSeries> series; // mu1, mu3, h1L, h3L, psi_proxy, rho*_a_b
    ExperimentMetadata meta;

    const ObservableSeries& find(const std::string& name) const;
};

// Deterministic given all arguments. thermalization < 0 selects the default
// policy: discard max(1000 sweeps, 20 autocorrelation times of mu3), the
// autocorrelation time being estimated on a 1000-sweep pilot block.
ExperimentResult run_experiment(const ModelParams& p, const DisorderRealization& dis,
                                int n_replicas, std::int64_t sweeps, std::int64_t thermalization,
                                int measure_interval, std::uint64_t master_seed);

} // namespace rsb::mc

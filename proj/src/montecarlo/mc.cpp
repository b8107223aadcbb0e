#include "rsb/montecarlo/mc.hpp"

#include <cmath>
#include <string>

#include "rsb/core/error.hpp"
#include "rsb/core/rng.hpp"
#include "rsb/kernels/kernels.hpp"

namespace rsb::mc {

using pathintegral::ClassicalModel;

ReplicaState init_replicas(const ClassicalModel& m, int n_replicas, std::uint64_t master_seed) {
    if (n_replicas < 2) throw ConfigError("need at least two replicas");
    ReplicaState st;
    const std::size_t n = static_cast<std::size_t>(m.n_spacetime());
    st.configs.reserve(n_replicas);
    st.rngs.reserve(n_replicas);
    for (int a = 0; a < n_replicas; ++a) {
        st.rngs.emplace_back(split_seed(master_seed, 1 + static_cast<std::uint64_t>(a)));
        st.configs.push_back(SpinConfiguration::random(n, st.rngs.back()));
    }
    return st;
}

HeatBath::HeatBath(const ClassicalModel& m, double beta) : model_(&m), beta_(beta) {
    if (!(beta > 0.0)) throw ConfigError("heat bath requires beta > 0");
    const int n = m.n_spacetime();
    base_.resize(n + 1);
    base_[0] = 0;
    for (int w = 0; w < n; ++w) {
        const int deg = m.adj_offset[w + 1] - m.adj_offset[w];
        base_[w + 1] = base_[w] + (deg + 1) * 4;
    }
    prob_.resize(base_[n]);
    for (int w = 0; w < n; ++w) {
        const int deg = m.adj_offset[w + 1] - m.adj_offset[w];
        const int wp = m.lattice.time_prev(w);
        const bool self_loop = m.lattice.time_next(w) == w;
        const double kp = self_loop ? 0.0 : m.temporal_coupling[wp];
        const double kn = self_loop ? 0.0 : m.temporal_coupling[w];
        for (int sidx = 0; sidx <= deg; ++sidx) {
            const double spatial_sum = 2.0 * sidx - deg; // -deg, -deg+2, ..., +deg
            for (int combo = 0; combo < 4; ++combo) {
                const double sp = (combo & 2) ? 1.0 : -1.0;
                const double sn = (combo & 1) ? 1.0 : -1.0;
                const double phi = m.spatial_coupling * spatial_sum + kp * sp + kn * sn +
                                   m.site_field[w];
                prob_[base_[w] + sidx * 4 + combo] = 1.0 / (1.0 + std::exp(-2.0 * beta * phi));
            }
        }
    }

    // checkerboard order: parity of (sum of coordinates + t); bipartite only
    // for even M (the temporal wrap links t=M to t=1)
    bipartite_ = (m.lattice.M % 2 == 0);
    if (bipartite_) {
        std::vector<std::int32_t> even, odd;
        for (int w = 0; w < n; ++w) {
            const auto& x = m.lattice.base.sites[m.lattice.site_of(w)];
            int par = m.lattice.slice_of(w);
            for (int k = 0; k < m.lattice.base.d; ++k) par += x[k];
            ((par & 1) == 0 ? even : odd).push_back(w);
        }
        n_even_ = static_cast<int>(even.size());
        parity_order_ = std::move(even);
        parity_order_.insert(parity_order_.end(), odd.begin(), odd.end());
    }
}

inline void HeatBath::update_site(SpinConfiguration& s, int w, std::mt19937_64& rng) const {
    const ClassicalModel& m = *model_;
    int spatial = 0;
    for (std::int32_t k = m.adj_offset[w]; k < m.adj_offset[w + 1]; ++k)
        spatial += s.values[m.adj[k]];
    const int deg = m.adj_offset[w + 1] - m.adj_offset[w];
    const int sidx = (spatial + deg) >> 1;
    const int combo = ((s.values[m.lattice.time_prev(w)] > 0) ? 2 : 0) |
                      ((s.values[m.lattice.time_next(w)] > 0) ? 1 : 0);
    const double p = prob_[base_[w] + sidx * 4 + combo];
    s.values[w] = (uniform01(rng) < p) ? std::int8_t{1} : std::int8_t{-1};
}

void HeatBath::sweep(SpinConfiguration& s, std::mt19937_64& rng) const {
    const int n = model_->n_spacetime();
    for (int w = 0; w < n; ++w) update_site(s, w, rng);
}

void HeatBath::sweep_checkerboard(SpinConfiguration& s, std::mt19937_64& rng) const {
    if (!bipartite_)
        throw Error("checkerboard sweep requires even M (bipartite spacetime lattice)");
    for (std::int32_t w : parity_order_) update_site(s, w, rng);
}

double HeatBath::flip_up_probability(const SpinConfiguration& s, int w) const {
    const double phi = pathintegral::local_field(*model_, s, w);
    return 1.0 / (1.0 + std::exp(-2.0 * beta_ * phi));
}

void heat_bath_sweep(ReplicaState& state, const ClassicalModel& m, double beta) {
    HeatBath hb(m, beta);
    for (std::size_t a = 0; a < state.configs.size(); ++a)
        hb.sweep(state.configs[a], state.rngs[a]);
    state.sweep_count += 1;
}

std::vector<PairOverlap> measure_overlaps(const ReplicaState& state, const ClassicalModel& m) {
    const int nrep = static_cast<int>(state.configs.size());
    const std::size_t n = static_cast<std::size_t>(m.n_spacetime());
    const std::size_t rows = static_cast<std::size_t>(m.lattice.base.n_sites());
    const std::size_t period = static_cast<std::size_t>(m.lattice.M);
    const double nv_m = static_cast<double>(n); // |V| * M

    std::vector<std::vector<std::int8_t>> prod(nrep, std::vector<std::int8_t>(n));
    std::vector<std::int64_t> prod_sum(nrep);
    for (int a = 0; a < nrep; ++a) {
        kern::temporal_products(state.configs[a].values, prod[a], rows, period);
        prod_sum[a] = kern::sum_i8(prod[a]);
    }

    std::vector<PairOverlap> out;
    out.reserve(static_cast<std::size_t>(nrep) * (nrep - 1) / 2);
    for (int a = 0; a < nrep; ++a) {
        for (int b = a + 1; b < nrep; ++b) {
            PairOverlap po;
            po.a = a;
            po.b = b;
            po.rho3 = static_cast<double>(kern::dot_i8(state.configs[a].values,
                                                       state.configs[b].values)) /
                      (4.0 * nv_m);
            const std::int64_t cross = kern::dot_i8(prod[a], prod[b]);
            po.rho1 = (static_cast<double>(n) - prod_sum[a] - prod_sum[b] + cross) / (16.0 * nv_m);
            out.push_back(po);
        }
    }
    return out;
}

FieldObservables measure_fields(const ReplicaState& state, const DisorderRealization& dis) {
    std::size_t nv = 1;
    for (int k = 0; k < dis.d; ++k) nv *= static_cast<std::size_t>(dis.L);
    const std::size_t n = nv * static_cast<std::size_t>(dis.M);
    const double nv_m = static_cast<double>(n);
    const double root_m = std::sqrt(static_cast<double>(dis.M));

    double h1_total = 0.0;
    for (double v : dis.h1) h1_total += v;

    FieldObservables acc;
    std::vector<std::int8_t> prod(n);
    for (const auto& cfg : state.configs) {
        if (cfg.values.size() != n)
            throw ShapeMismatch("configuration does not match the disorder lattice");
        kern::temporal_products(cfg.values, prod, nv, static_cast<std::size_t>(dis.M));
        const std::int64_t psum = kern::sum_i8(prod);
        const std::int64_t ssum = kern::sum_i8(cfg.values);
        acc.mu1 += (static_cast<double>(n) - psum) / (4.0 * nv_m);
        acc.mu3 += static_cast<double>(ssum) / (2.0 * nv_m);
        acc.h1L += (h1_total - kern::dot_f64_i8(dis.h1, prod)) / (4.0 * nv * root_m);
        acc.h3L += kern::dot_f64_i8(dis.h3, cfg.values) / (2.0 * nv * root_m);
    }
    const double nrep = static_cast<double>(state.configs.size());
    acc.mu1 /= nrep;
    acc.mu3 /= nrep;
    acc.h1L /= nrep;
    acc.h3L /= nrep;
    return acc;
}

const ObservableSeries& ExperimentResult::find(const std::string& name) const {
    for (const auto& s : series)
        if (s.name == name) return s;
    throw Error("no series named '" + name + "'");
}

ExperimentResult run_experiment(const ModelParams& p, const DisorderRealization& dis,
                                int n_replicas, std::int64_t sweeps, std::int64_t thermalization,
                                int measure_interval, std::uint64_t master_seed) {
    p.validate();
    if (measure_interval < 1) throw ConfigError("measure_interval must be >= 1");
    ClassicalModel model = pathintegral::compile(p, dis);
    HeatBath hb(model, p.beta);
    ReplicaState state = init_replicas(model, n_replicas, master_seed);

    auto do_sweep = [&] {
        for (int a = 0; a < n_replicas; ++a) hb.sweep(state.configs[a], state.rngs[a]);
        state.sweep_count += 1;
    };

    std::int64_t used = 0;
    if (thermalization >= 0) {
        for (std::int64_t k = 0; k < thermalization; ++k) do_sweep();
        used = thermalization;
    } else {
        // default policy: discard max(1000, 20 tau_int(mu3)), tau estimated
        // on a pilot block
        for (std::int64_t k = 0; k < 1000; ++k) do_sweep();
        std::vector<double> pilot;
        pilot.reserve(1000);
        for (std::int64_t k = 0; k < 1000; ++k) {
            do_sweep();
            pilot.push_back(measure_fields(state, dis).mu3);
        }
        const double tau = tau_int(pilot);
        const std::int64_t extra =
            std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(20.0 * tau)) - 2000);
        for (std::int64_t k = 0; k < extra; ++k) do_sweep();
        used = 2000 + extra;
    }
    if (sweeps <= used)
        throw ConfigError("sweeps (" + std::to_string(sweeps) +
                          ") must exceed the thermalization (" + std::to_string(used) + ")");

    ExperimentResult res;
    auto add_series = [&](const std::string& name) {
        ObservableSeries s;
        s.name = name;
        res.series.push_back(std::move(s));
        return res.series.size() - 1;
    };
    const std::size_t i_mu1 = add_series("mu1");
    const std::size_t i_mu3 = add_series("mu3");
    const std::size_t i_h1 = add_series("h1L");
    const std::size_t i_h3 = add_series("h3L");
    const std::size_t i_psi = add_series("psi_proxy");
    std::vector<std::vector<std::size_t>> i_rho(2);
    for (int a = 0; a < n_replicas; ++a)
        for (int b = a + 1; b < n_replicas; ++b) {
            std::string tag = std::to_string(a + 1) + "_" + std::to_string(b + 1);
            i_rho[0].push_back(add_series("rho1_" + tag));
            i_rho[1].push_back(add_series("rho3_" + tag));
        }

    const double nv = static_cast<double>(p.n_sites());
    auto record = [&](std::size_t idx, double v) {
        res.series[idx].samples.push_back(v);
        res.series[idx].sweeps.push_back(state.sweep_count);
    };

    const std::int64_t measure_sweeps = sweeps - used;
    for (std::int64_t k = 1; k <= measure_sweeps; ++k) {
        do_sweep();
        if (k % measure_interval != 0) continue;

        FieldObservables f = measure_fields(state, dis);
        double psi_proxy = 0.0;
        for (const auto& cfg : state.configs)
            psi_proxy += -pathintegral::classical_energy(model, cfg) / nv;
        psi_proxy /= n_replicas;
        if (!std::isfinite(psi_proxy))
            throw Error("energy evaluation produced a non-finite value at sweep " +
                        std::to_string(state.sweep_count) + " (seed " +
                        std::to_string(master_seed) + ")");
        record(i_mu1, f.mu1);
        record(i_mu3, f.mu3);
        record(i_h1, f.h1L);
        record(i_h3, f.h3L);
        record(i_psi, psi_proxy);

        auto overlaps = measure_overlaps(state, model);
        for (std::size_t q = 0; q < overlaps.size(); ++q) {
            record(i_rho[0][q], overlaps[q].rho1);
            record(i_rho[1][q], overlaps[q].rho3);
        }
    }

    for (auto& s : res.series)
        if (s.samples.size() >= 8) s.bin_width = auto_binned_error(s.samples).bin_width;

    res.meta.master_seed = master_seed;
    for (int a = 0; a < n_replicas; ++a)
        res.meta.replica_seeds.push_back(split_seed(master_seed, 1 + static_cast<std::uint64_t>(a)));
    res.meta.n_replicas = n_replicas;
    res.meta.sweeps = sweeps;
    res.meta.thermalization_used = used;
    res.meta.measure_interval = measure_interval;
    const auto& mu3 = res.series[i_mu3].samples;
    res.meta.tau_int_mu3 = mu3.size() >= 8 ? tau_int(mu3) : 0.5;
    res.meta.bin_width_mu3 = res.series[i_mu3].bin_width;
    return res;
}

} // namespace rsb::mc

#include "rsb/verify/verify.hpp"

#include <cmath>
#include <sstream>

#include "rsb/core/error.hpp"
#include "rsb/core/parallel.hpp"
#include "rsb/core/rng.hpp"
#include "rsb/montecarlo/mc.hpp"
#include "rsb/montecarlo/stats.hpp"
#include "rsb/spectral/spectral.hpp"

namespace rsb::verify {

using pathintegral::ClassicalModel;
using pathintegral::ClassicalExact;
using spectral::Operator;

namespace {

std::string digest(const ModelParams& p) {
    std::ostringstream os;
    os << "beta=" << p.beta << " J1=" << p.J1 << " J3=" << p.J3 << " c=" << p.c << " b1=" << p.b1
       << " b3=" << p.b3 << " d=" << p.d << " L=" << p.L << " M=" << p.M;
    return os.str();
}

// <S3_x> for all sites from the diagonal ensemble probabilities.
std::vector<double> s3_onepoint(const spectral::SpectralDecomposition& s, int n_sites) {
    const Eigen::Index dim = s.dim();
    Eigen::VectorXd pk = Eigen::VectorXd::Zero(dim); // basis-state probabilities
    for (Eigen::Index n = 0; n < dim; ++n)
        pk += (s.weights(n) / s.weight_sum) * s.basis.col(n).cwiseAbs2();
    std::vector<double> out(static_cast<std::size_t>(n_sites), 0.0);
    for (int x = 0; x < n_sites; ++x) {
        const std::int64_t mask = std::int64_t{1} << x;
        double v = 0.0;
        for (Eigen::Index k = 0; k < dim; ++k) v += pk(k) * ((k & mask) ? 0.5 : -0.5);
        out[static_cast<std::size_t>(x)] = v;
    }
    return out;
}

} // namespace

CheckReport fkg_truncated_pair(const ClassicalModel& m, double beta, double tol, int cap_bits) {
    ClassicalExact ex = pathintegral::exact_classical_sum(m, beta, /*with_pair=*/true, cap_bits);
    const int n = m.n_spacetime();
    double worst = 0.0;
    for (int w = 0; w < n; ++w)
        for (int z = 0; z < n; ++z) {
            const double trunc = ex.pair(w, z) - ex.magnetization[w] * ex.magnetization[z];
            worst = std::max(worst, -trunc);
        }
    CheckReport r;
    r.check_id = "fkg_truncated_pair";
    r.instances = n * n;
    r.worst_violation = worst;
    r.tolerance = tol;
    r.context = "|W|=" + std::to_string(n) + " beta=" + std::to_string(beta);
    r.finalize();
    return r;
}

CheckReport fkg_monotonicity_spectral(const ModelParams& p, const DisorderRealization& dis,
                                      double step, double tol, std::int64_t dim_cap) {
    QuantumLattice lat = build_lattice(p);
    const int nv = lat.n_sites();

    auto onepoint_at = [&](int y, double delta) {
        DisorderRealization d2 = dis;
        d2.g3[static_cast<std::size_t>(y)] += delta;
        Operator h = spectral::build_hamiltonian(p, lat, d2, spectral::PerturbationMode::none,
                                                 dim_cap);
        return s3_onepoint(spectral::build_spectral(h, p.beta), nv);
    };

    double worst = 0.0;
    double richardson = 0.0;
    for (int y = 0; y < nv; ++y) {
        auto up = onepoint_at(y, step), dn = onepoint_at(y, -step);
        auto up2 = onepoint_at(y, step / 2), dn2 = onepoint_at(y, -step / 2);
        for (int x = 0; x < nv; ++x) {
            const double d1 = (up[x] - dn[x]) / (2.0 * step);
            const double d2 = (up2[x] - dn2[x]) / step;
            worst = std::max(worst, -d1);
            richardson = std::max(richardson, std::abs(d1 - d2));
        }
    }
    CheckReport r;
    r.check_id = "fkg_monotonicity_spectral";
    r.instances = nv * nv;
    r.worst_violation = worst;
    r.tolerance = tol;
    std::ostringstream os;
    os << digest(p) << " step=" << step << " richardson_dev=" << richardson;
    r.context = os.str();
    r.finalize();
    return r;
}

CheckReport fkg_monotonicity_classical(const ModelParams& p, const DisorderRealization& dis,
                                       double step, double tol, int cap_bits) {
    const int nv = static_cast<int>(p.n_sites());
    const int nw = static_cast<int>(p.n_spacetime());

    auto marginals_at = [&](int y, double delta) {
        DisorderRealization d2 = dis;
        d2.g3[static_cast<std::size_t>(y)] += delta;
        ClassicalModel m = pathintegral::compile(p, d2);
        return pathintegral::exact_classical_sum(m, p.beta, /*with_pair=*/false, cap_bits)
            .magnetization;
    };

    double worst = 0.0;
    double richardson = 0.0;
    for (int y = 0; y < nv; ++y) {
        auto up = marginals_at(y, step), dn = marginals_at(y, -step);
        auto up2 = marginals_at(y, step / 2), dn2 = marginals_at(y, -step / 2);
        for (int w = 0; w < nw; ++w) {
            const double d1 = (up[w] - dn[w]) / (2.0 * step);
            const double d2 = (up2[w] - dn2[w]) / step;
            worst = std::max(worst, -d1);
            richardson = std::max(richardson, std::abs(d1 - d2));
        }
    }
    CheckReport r;
    r.check_id = "fkg_monotonicity_classical";
    r.instances = nv * nw;
    r.worst_violation = worst;
    r.tolerance = tol;
    std::ostringstream os;
    os << digest(p) << " step=" << step << " richardson_dev=" << richardson;
    r.context = os.str();
    r.finalize();
    return r;
}

CheckReport check_four_point_bound(const ClassicalModel& m, double beta, double tol,
                                   int cap_bits) {
    const int n = m.n_spacetime();
    if (n > cap_bits)
        throw CapExceeded("four-point enumeration over 2^" + std::to_string(n) +
                          " spins exceeds cap 2^" + std::to_string(cap_bits));

    // one enumeration pass accumulating 1-, 2- and sorted 4-point sums
    const std::uint64_t total = std::uint64_t{1} << n;
    SpinConfiguration s;
    s.values.assign(static_cast<std::size_t>(n), std::int8_t{-1});
    double e = pathintegral::classical_energy(m, s);
    double e_min = e;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int w = std::countr_zero(i);
        e += 2.0 * s.values[w] * pathintegral::local_field(m, s, w);
        s.values[w] = static_cast<std::int8_t>(-s.values[w]);
        if ((i & 0xFFFu) == 0) e = pathintegral::classical_energy(m, s);
        e_min = std::min(e_min, e);
    }

    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<double> m1(nn, 0.0);
    std::vector<double> m2(nn * nn, 0.0);
    std::vector<double> m4(nn * nn * nn * nn, 0.0);
    double z = 0.0;

    std::fill(s.values.begin(), s.values.end(), std::int8_t{-1});
    e = pathintegral::classical_energy(m, s);
    auto accumulate = [&](double energy) {
        const double wgt = std::exp(-beta * (energy - e_min));
        z += wgt;
        for (int a = 0; a < n; ++a) {
            const double pa = wgt * s.values[a];
            m1[a] += pa;
            for (int b = a; b < n; ++b) {
                const double pb = pa * s.values[b];
                m2[static_cast<std::size_t>(a) * nn + b] += pb;
                for (int c = b; c < n; ++c) {
                    const double pc = pb * s.values[c];
                    for (int d2 = c; d2 < n; ++d2)
                        m4[((static_cast<std::size_t>(a) * nn + b) * nn + c) * nn + d2] +=
                            pc * s.values[d2];
                }
            }
        }
    };
    accumulate(e);
    for (std::uint64_t i = 1; i < total; ++i) {
        const int w = std::countr_zero(i);
        e += 2.0 * s.values[w] * pathintegral::local_field(m, s, w);
        s.values[w] = static_cast<std::int8_t>(-s.values[w]);
        if ((i & 0xFFFu) == 0) e = pathintegral::classical_energy(m, s);
        accumulate(e);
    }

    auto one = [&](int a) { return m1[static_cast<std::size_t>(a)] / z; };
    auto two = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return m2[static_cast<std::size_t>(a) * nn + b] / z;
    };
    auto four = [&](int a, int b, int c, int d2) {
        int idx[4] = {a, b, c, d2};
        std::sort(idx, idx + 4);
        return m4[((static_cast<std::size_t>(idx[0]) * nn + idx[1]) * nn + idx[2]) * nn + idx[3]] /
               z;
    };
    auto truncated = [&](int a, int b) { return two(a, b) - one(a) * one(b); };

    double worst = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int w = 0; w < n; ++w)
                for (int zz = 0; zz < n; ++zz) {
                    const double lhs = std::abs(four(x, y, w, zz) - two(x, y) * two(w, zz));
                    const double rhs = truncated(x, w) + truncated(x, zz) + truncated(y, w) +
                                       truncated(y, zz);
                    worst = std::max(worst, lhs - rhs);
                }

    CheckReport r;
    r.check_id = "four_point_bound";
    r.instances = n * n * n * n;
    r.worst_violation = worst;
    r.tolerance = tol;
    r.context = "|W|=" + std::to_string(n) + " beta=" + std::to_string(beta);
    r.finalize();
    return r;
}

DuhamelGibbsTriple duhamel_vs_gibbs_overlap(const ModelParams& p, const DisorderRealization& dis,
                                            int component, std::int64_t replica_dim_cap) {
    if (p.b1 != 0.0 || p.b3 != 0.0)
        throw ConfigError("the overlap sandwich is evaluated in the unperturbed model");
    QuantumLattice lat = build_lattice(p);
    Operator h = spectral::build_hamiltonian(p, lat, dis);
    Operator hrep = spectral::replicate_hamiltonian(h, replica_dim_cap);
    Operator r = spectral::overlap_operator(component, lat.n_sites(), replica_dim_cap);
    spectral::SpectralDecomposition s = spectral::build_spectral(hrep, p.beta);
    spectral::HarrisTriple t = spectral::harris_check(s, r);
    return DuhamelGibbsTriple{t.lower, t.middle, t.upper - t.lower};
}

namespace {

ModelParams gg_component_params(const ModelParams& p, int component) {
    ModelParams q = p;
    if (component == 3) {
        if (p.b3 == 0.0) throw ConfigError("gg_residual with i=3 requires b3 != 0");
        q.b1 = 0.0;
    } else if (component == 1) {
        if (p.b1 == 0.0) throw ConfigError("gg_residual with i=1 requires b1 != 0");
        q.b3 = 0.0;
    } else {
        throw ConfigError("gg component must be 1 or 3");
    }
    return q;
}

GgRealizationRow gg_measure_one(const ModelParams& q, int component, int n_replicas,
                                std::uint64_t disorder_seed, std::uint64_t mc_seed,
                                const McProtocol& proto) {
    DisorderRealization dis = sample_disorder(q, disorder_seed);
    ClassicalModel model = pathintegral::compile(q, dis);
    mc::HeatBath hb(model, q.beta);
    mc::ReplicaState state = mc::init_replicas(model, n_replicas, mc_seed);

    auto do_sweep = [&] {
        for (int a = 0; a < n_replicas; ++a) hb.sweep(state.configs[a], state.rngs[a]);
        state.sweep_count += 1;
    };
    std::int64_t therm = proto.thermalization >= 0 ? proto.thermalization : 1000;
    for (std::int64_t k = 0; k < therm; ++k) do_sweep();

    GgRealizationRow row;
    row.seed = disorder_seed;
    std::int64_t n_meas = 0;
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n_replicas, n_replicas);
    const std::int64_t measure_sweeps = proto.sweeps - therm;
    if (measure_sweeps < proto.measure_interval)
        throw ConfigError("GG protocol leaves no measurement sweeps");

    for (std::int64_t k = 1; k <= measure_sweeps; ++k) {
        do_sweep();
        if (k % proto.measure_interval != 0) continue;
        auto overlaps = mc::measure_overlaps(state, model);
        for (const auto& po : overlaps) {
            const double v = component == 1 ? po.rho1 : po.rho3;
            rho(po.a, po.b) = v;
            rho(po.b, po.a) = v;
        }
        double mean_acc = 0.0, sq_acc = 0.0, chain_acc = 0.0, disjoint_acc = 0.0;
        int n_pairs = 0, n_chain = 0, n_disjoint = 0;
        for (int a = 0; a < n_replicas; ++a)
            for (int b = a + 1; b < n_replicas; ++b) {
                mean_acc += rho(a, b);
                sq_acc += rho(a, b) * rho(a, b);
                ++n_pairs;
            }
        for (int a = 0; a < n_replicas; ++a)
            for (int b = 0; b < n_replicas; ++b)
                for (int c = b + 1; c < n_replicas; ++c) {
                    if (b == a || c == a) continue;
                    chain_acc += rho(a, b) * rho(a, c);
                    ++n_chain;
                }
        if (n_replicas >= 4) {
            for (int a = 0; a < n_replicas; ++a)
                for (int b = a + 1; b < n_replicas; ++b)
                    for (int c = a + 1; c < n_replicas; ++c) {
                        if (c == b) continue;
                        for (int d = c + 1; d < n_replicas; ++d) {
                            if (d == b) continue;
                            disjoint_acc += rho(a, b) * rho(c, d);
                            ++n_disjoint;
                        }
                    }
        }
        row.rho_mean += mean_acc / n_pairs;
        row.rho_sq += sq_acc / n_pairs;
        row.rho_chain += chain_acc / n_chain;
        if (n_disjoint > 0) row.rho_disjoint += disjoint_acc / n_disjoint;
        ++n_meas;
    }
    row.rho_mean /= n_meas;
    row.rho_sq /= n_meas;
    row.rho_chain /= n_meas;
    row.rho_disjoint /= n_meas;
    return row;
}

} // namespace

GgEstimate gg_residual(const ModelParams& p, int n, int component, int n_realizations,
                       std::uint64_t master_seed, const McProtocol& proto, int workers) {
    if (n != 2 && n != 3) throw ConfigError("gg_residual supports n = 2 or 3");
    if (n_realizations < 2) throw ConfigError("gg_residual needs at least two realizations");
    const ModelParams q = gg_component_params(p, component);
    const int n_replicas = n + 1;

    GgEstimate est;
    est.rows.resize(static_cast<std::size_t>(n_realizations));
    parallel_for_index(n_realizations, workers, [&](int r) {
        const std::uint64_t ds = split_seed(master_seed, 2 * static_cast<std::uint64_t>(r));
        const std::uint64_t ms = split_seed(master_seed, 2 * static_cast<std::uint64_t>(r) + 1);
        est.rows[static_cast<std::size_t>(r)] =
            gg_measure_one(q, component, n_replicas, ds, ms, proto);
    });

    double s_mean = 0, s_sq = 0, s_chain = 0, s_disjoint = 0;
    for (const auto& row : est.rows) {
        s_mean += row.rho_mean;
        s_sq += row.rho_sq;
        s_chain += row.rho_chain;
        s_disjoint += row.rho_disjoint;
    }
    const int nr = n_realizations;
    auto residual_omitting = [&](int omit) {
        const double cnt = omit < 0 ? nr : nr - 1;
        auto avg = [&](double total, double rowval) {
            return (total - (omit < 0 ? 0.0 : rowval)) / cnt;
        };
        const auto& row = est.rows[static_cast<std::size_t>(std::max(omit, 0))];
        const double m = avg(s_mean, row.rho_mean);
        const double sq = avg(s_sq, row.rho_sq);
        const double ch = avg(s_chain, row.rho_chain);
        const double dj = avg(s_disjoint, row.rho_disjoint);
        if (n == 2) return 2.0 * ch - m * m - sq;
        return 3.0 * dj - m * m - 2.0 * ch;
    };
    mc::ErrorEstimate jk = mc::jackknife_delete1(nr, residual_omitting);
    est.residual = jk.value;
    est.error = jk.error;
    est.n_realizations = nr;
    return est;
}

std::vector<double> gg_trivial_residuals(const ModelParams& p, int component, int n_realizations,
                                         std::uint64_t master_seed, const McProtocol& proto,
                                         int workers) {
    const ModelParams q = gg_component_params(p, component);
    std::vector<double> out(static_cast<std::size_t>(n_realizations), 0.0);
    parallel_for_index(n_realizations, workers, [&](int r) {
        const std::uint64_t ds = split_seed(master_seed, 2 * static_cast<std::uint64_t>(r));
        const std::uint64_t ms = split_seed(master_seed, 2 * static_cast<std::uint64_t>(r) + 1);
        GgRealizationRow row = gg_measure_one(q, component, 3, ds, ms, proto);
        // n = 2, f = 1: every term is the same exchangeable pair estimate
        const double e13 = row.rho_mean;
        const double e12 = row.rho_mean;
        out[static_cast<std::size_t>(r)] = e13 - 0.5 * e12 - 0.5 * e12;
    });
    return out;
}

ScanTarget scan_target_from_string(const std::string& s) {
    if (s == "psi") return ScanTarget::psi;
    if (s == "mu3") return ScanTarget::mu3;
    if (s == "overlap_total") return ScanTarget::overlap_total;
    if (s == "overlap_gibbs_part") return ScanTarget::overlap_gibbs_part;
    throw ConfigError("unknown scan target '" + s + "'");
}

std::string to_string(ScanTarget t) {
    switch (t) {
        case ScanTarget::psi: return "psi";
        case ScanTarget::mu3: return "mu3";
        case ScanTarget::overlap_total: return "overlap_total";
        case ScanTarget::overlap_gibbs_part: return "overlap_gibbs_part";
    }
    return "?";
}

ScanResult variance_scan(const ModelParams& p, const std::vector<int>& l_list,
                         int n_realizations, std::uint64_t master_seed, ScanTarget target,
                         int workers, std::int64_t dim_cap) {
    if (p.b1 != 0.0 || p.b3 != 0.0)
        throw ConfigError("variance_scan runs on the unperturbed model (b1 = b3 = 0)");
    if (n_realizations < 2) throw ConfigError("variance_scan needs >= 2 realizations");
    if (l_list.empty()) throw ConfigError("empty L list");

    ScanResult res;
    res.axis = "L";
    res.target = target;

    for (int l : l_list) {
        ModelParams pl = p;
        pl.L = l;
        pl.validate();
        QuantumLattice lat = build_lattice(pl);
        const int nv = lat.n_sites();

        // per-realization quantities; interpretation depends on target
        std::vector<double> va(static_cast<std::size_t>(n_realizations));
        std::vector<double> vb(static_cast<std::size_t>(n_realizations), 0.0);
        parallel_for_index(n_realizations, workers, [&](int r) {
            const std::uint64_t seed = split_seed(master_seed, static_cast<std::uint64_t>(r));
            DisorderRealization dis = sample_disorder(pl, seed);
            Operator h = spectral::build_hamiltonian(pl, lat, dis,
                                                     spectral::PerturbationMode::none, dim_cap);
            spectral::SpectralDecomposition s = spectral::build_spectral(h, pl.beta);
            switch (target) {
                case ScanTarget::psi:
                    va[r] = spectral::free_energy_density(s, pl);
                    break;
                case ScanTarget::mu3: {
                    Operator m3 = spectral::magnetization(3, nv, dim_cap);
                    const double duh = spectral::duhamel_product(s, m3, m3);
                    const double avg = spectral::gibbs_expectation(s, m3);
                    va[r] = duh - avg * avg;
                    break;
                }
                case ScanTarget::overlap_total: {
                    spectral::OverlapOptions opt;
                    opt.with_duhamel = false;
                    auto om = spectral::overlap_moments(s, pl, 3, opt);
                    va[r] = om.second_gibbs;
                    vb[r] = om.mean;
                    break;
                }
                case ScanTarget::overlap_gibbs_part: {
                    spectral::OverlapOptions opt;
                    opt.replica_check_cap = 0;
                    auto om = spectral::overlap_moments(s, pl, 3, opt);
                    va[r] = *om.second_duhamel - om.mean * om.mean;
                    break;
                }
            }
        });

        double sa = 0, sb = 0;
        for (int r = 0; r < n_realizations; ++r) {
            sa += va[r];
            sb += vb[r];
        }
        auto value_omitting = [&](int omit) {
            const double cnt = omit < 0 ? n_realizations : n_realizations - 1;
            const double oa = omit < 0 ? 0.0 : va[static_cast<std::size_t>(omit)];
            const double ob = omit < 0 ? 0.0 : vb[static_cast<std::size_t>(omit)];
            const double ma = (sa - oa) / cnt;
            const double mb = (sb - ob) / cnt;
            switch (target) {
                case ScanTarget::psi: {
                    double ss = 0.0;
                    int used = 0;
                    for (int r = 0; r < n_realizations; ++r) {
                        if (r == omit) continue;
                        ss += (va[r] - ma) * (va[r] - ma);
                        ++used;
                    }
                    return ss / (used - 1);
                }
                case ScanTarget::mu3:
                case ScanTarget::overlap_gibbs_part:
                    return ma;
                case ScanTarget::overlap_total:
                    return ma - mb * mb;
            }
            return 0.0;
        };
        mc::ErrorEstimate jk = mc::jackknife_delete1(n_realizations, value_omitting);

        ScanPoint pt;
        pt.axis = l;
        pt.estimate = jk.value;
        pt.error = jk.error;
        pt.n_samples = n_realizations;
        res.points.push_back(pt);
    }

    bool fit_ok = true;
    for (const auto& pt : res.points)
        if (!(pt.estimate - 2.0 * pt.error > 0.0)) fit_ok = false;
    if (fit_ok && res.points.size() >= 2) {
        std::vector<double> lx, ly, ls;
        for (const auto& pt : res.points) {
            lx.push_back(std::log(pt.axis));
            ly.push_back(std::log(pt.estimate));
            ls.push_back(pt.error / pt.estimate);
        }
        res.fit = wls_fit(lx, ly, ls);
    }
    return res;
}

} // namespace rsb::verify

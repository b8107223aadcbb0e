#include "rsb/cli/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "rsb/core/disorder.hpp"
#include "rsb/core/error.hpp"
#include "rsb/core/parallel.hpp"
#include "rsb/core/rng.hpp"
#include "rsb/montecarlo/mc.hpp"
#include "rsb/pathintegral/classical.hpp"
#include "rsb/spectral/spectral.hpp"

namespace rsb::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using verify::CheckReport;

namespace {

json report_to_json(const CheckReport& r) {
    json j;
    j["check_id"] = r.check_id;
    j["instances"] = r.instances;
    j["worst_violation"] = format_double17(r.worst_violation);
    j["tolerance"] = format_double17(r.tolerance);
    j["pass"] = r.pass;
    j["context"] = r.context;
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
}

// Aggregates per-realization reports of one check into a single summary.
CheckReport aggregate(const std::string& id, const std::vector<CheckReport>& parts) {
    CheckReport agg;
    agg.check_id = id;
    if (parts.empty()) {
        agg.tolerance = 0.0;
        agg.finalize();
        return agg;
    }
    agg.tolerance = parts.front().tolerance;
    for (const auto& p : parts) {
        agg.instances += p.instances;
        agg.worst_violation = std::max(agg.worst_violation, p.worst_violation);
    }
    agg.context = parts.front().context + " realizations=" + std::to_string(parts.size());
    agg.finalize();
    return agg;
}

std::string csv17(double v) { return format_double17(v); }

// --- ed-check --------------------------------------------------------------

spectral::Operator random_hermitian(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd r(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) r(i, j) = 2.0 * uniform01(rng) - 1.0;
    Eigen::MatrixXd h = 0.5 * (r + r.transpose());
    h /= h.norm();
    return h.cast<std::complex<double>>();
}

int run_ed_check(const RunConfig& cfg, const std::string& out) {
    const ModelParams& p = cfg.params;
    if (p.b1 != 0.0 || p.b3 != 0.0)
        throw ConfigError("ed-check runs on the unperturbed model; set b1 = b3 = 0");
    QuantumLattice lat = build_lattice(p);
    const int nv = lat.n_sites();

    CheckReport magnitude{"spin_magnitude", 0, 0.0, 1e-10, false, ""};
    CheckReport s2_one{"s2_onepoint", 0, 0.0, 1e-10, false, ""};
    CheckReport s2_pair{"s2_pair", 0, 0.0, 1e-10, false, ""};
    CheckReport over2{"overlap_component2", 0, 0.0, 1e-10, false, ""};
    CheckReport symm{"duhamel_symmetry", 0, 0.0, 1e-10, false, ""};
    CheckReport deriv{"duhamel_derivative", 0, 0.0, 1e-6, false, ""};

    for (int k = 0; k < cfg.ensemble.count; ++k) {
        const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, k);
        DisorderRealization dis = sample_disorder(p, seed);
        spectral::Operator h =
            spectral::build_hamiltonian(p, lat, dis, spectral::PerturbationMode::none,
                                        cfg.caps.dim_cap);
        spectral::SpectralDecomposition s = spectral::build_spectral(h, p.beta);

        for (int x = 0; x < nv; ++x) {
            spectral::Operator sq = spectral::Operator::Zero(s.dim(), s.dim());
            for (int j = 1; j <= 3; ++j) {
                spectral::Operator sj = spectral::spin_op(j, x, nv);
                sq += sj * sj;
            }
            magnitude.worst_violation = std::max(
                magnitude.worst_violation, std::abs(spectral::gibbs_expectation(s, sq) - 0.75));
            ++magnitude.instances;

            spectral::Operator s2 = spectral::spin_op(2, x, nv);
            s2_one.worst_violation =
                std::max(s2_one.worst_violation, std::abs(spectral::gibbs_expectation(s, s2)));
            ++s2_one.instances;
            for (int y = 0; y < nv; ++y) {
                spectral::Operator s2y = spectral::spin_op(2, y, nv);
                const double expect = x == y ? 0.25 : 0.0;
                s2_pair.worst_violation =
                    std::max(s2_pair.worst_violation,
                             std::abs(spectral::gibbs_expectation(s, s2 * s2y) - expect));
                ++s2_pair.instances;
            }
        }

        spectral::OverlapOptions oo;
        oo.with_duhamel = false;
        auto om = spectral::overlap_moments(s, p, 2, oo);
        over2.worst_violation = std::max(over2.worst_violation, std::abs(om.mean));
        over2.worst_violation =
            std::max(over2.worst_violation, std::abs(om.second_gibbs - 1.0 / (16.0 * nv)));
        ++over2.instances;

        spectral::Operator o1 = random_hermitian(s.dim(), split_seed(seed, 101));
        spectral::Operator o2 = random_hermitian(s.dim(), split_seed(seed, 102));
        const double d12 = spectral::duhamel_product(s, o1, o2);
        const double d21 = spectral::duhamel_product(s, o2, o1);
        symm.worst_violation = std::max(symm.worst_violation, std::abs(d12 - d21));
        ++symm.instances;

        // beta^2 (O1,O2)_D vs central finite differences of Z under
        // H -> H - x1 O1 - x2 O2
        const double delta = 1e-4;
        auto logz_at = [&](double x1, double x2) {
            spectral::Operator hp = h - x1 * o1 - x2 * o2;
            return spectral::build_spectral(hp, p.beta).log_z;
        };
        const double z0 = s.log_z;
        const double fd = (std::exp(logz_at(delta, delta) - z0) -
                           std::exp(logz_at(delta, -delta) - z0) -
                           std::exp(logz_at(-delta, delta) - z0) +
                           std::exp(logz_at(-delta, -delta) - z0)) /
                          (4.0 * delta * delta);
        const double duh = p.beta * p.beta * d12;
        deriv.worst_violation =
            std::max(deriv.worst_violation,
                     std::abs(duh - fd) / std::max({std::abs(duh), std::abs(fd), 1e-12}));
        ++deriv.instances;
    }

    json arr = json::array();
    bool pass = true;
    for (CheckReport* r : {&magnitude, &s2_one, &s2_pair, &over2, &symm, &deriv}) {
        r->context = "ed-check count=" + std::to_string(cfg.ensemble.count);
        r->finalize();
        pass = pass && r->pass;
        arr.push_back(report_to_json(*r));
    }
    write_json(arr, out + "/reports/ed_check.json");
    return pass ? 0 : 1;
}

// --- trotter-scan ----------------------------------------------------------

int run_trotter_scan(const RunConfig& cfg, const std::string& out) {
    const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, 0);
    DisorderRealization dis = sample_disorder(cfg.params, seed);
    std::vector<double> errors = pathintegral::trotter_gap(cfg.params, dis, cfg.m_list,
                                                           cfg.caps.dim_cap, cfg.caps.enum_bits);

    std::string csv = "M,rel_error,ratio_to_previous\n";
    bool decreasing = true;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        csv += std::to_string(cfg.m_list[i]) + "," + csv17(errors[i]) + ",";
        if (i > 0) {
            csv += csv17(errors[i - 1] / errors[i]);
            if (!(errors[i] < errors[i - 1])) decreasing = false;
        }
        csv += "\n";
    }
    write_text(csv, out + "/results/trotter.csv");

    json j;
    j["m_list"] = cfg.m_list;
    json jerr = json::array();
    for (double e : errors) jerr.push_back(format_double17(e));
    j["rel_errors"] = jerr;
    j["strictly_decreasing"] = decreasing;
    j["disorder_seed"] = seed;
    write_json(j, out + "/reports/trotter.json");
    return decreasing ? 0 : 1;
}

// --- mc-run ----------------------------------------------------------------

int run_mc(const RunConfig& cfg, const std::string& out) {
    const std::uint64_t dseed = split_seed(cfg.ensemble.master_seed, 0);
    const std::uint64_t mseed = split_seed(cfg.ensemble.master_seed, 1);
    DisorderRealization dis = sample_disorder(cfg.params, dseed);
    save_realization(dis, out + "/disorder/realization_0.json");

    mc::ExperimentResult res =
        mc::run_experiment(cfg.params, dis, cfg.mc.replicas, cfg.mc.sweeps,
                           cfg.mc.thermalization, cfg.mc.interval, mseed);

    for (const auto& s : res.series) {
        std::string csv = "sweep,value\n";
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            csv += std::to_string(s.sweeps[i]) + "," + csv17(s.samples[i]) + "\n";
        write_text(csv, out + "/results/series_" + s.name + ".csv");
    }

    json j;
    j["master_seed"] = res.meta.master_seed;
    j["disorder_seed"] = dseed;
    j["replica_seeds"] = res.meta.replica_seeds;
    j["n_replicas"] = res.meta.n_replicas;
    j["sweeps"] = res.meta.sweeps;
    j["thermalization_used"] = res.meta.thermalization_used;
    j["measure_interval"] = res.meta.measure_interval;
    j["tau_int_mu3"] = format_double17(res.meta.tau_int_mu3);
    j["bin_width_mu3"] = res.meta.bin_width_mu3;
    json names = json::array();
    for (const auto& s : res.series) names.push_back(s.name);
    j["series"] = names;
    write_json(j, out + "/reports/mc_meta.json");
    return 0;
}

// --- fkg-check ---------------------------------------------------------------

int run_fkg_check(const RunConfig& cfg, const std::string& out) {
    const ModelParams& p = cfg.params;
    json arr = json::array();
    bool pass = true;

    for (const std::string& mode : cfg.fkg_modes) {
        std::vector<CheckReport> parts(static_cast<std::size_t>(cfg.ensemble.count));
        parallel_for_index(cfg.ensemble.count, cfg.workers, [&](int k) {
            const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, k);
            DisorderRealization dis = sample_disorder(p, seed);
            if (mode == "truncated_pair") {
                auto model = pathintegral::compile(p, dis);
                parts[k] = verify::fkg_truncated_pair(model, p.beta, 1e-12, cfg.caps.enum_bits);
            } else if (mode == "monotonicity_classical") {
                parts[k] = verify::fkg_monotonicity_classical(p, dis, 1e-4, 1e-6,
                                                              cfg.caps.enum_bits);
            } else { // monotonicity_spectral: the unperturbed quantum model
                ModelParams q = p;
                q.b1 = 0.0;
                q.b3 = 0.0;
                parts[k] = verify::fkg_monotonicity_spectral(q, dis, 1e-4, 1e-6,
                                                             cfg.caps.dim_cap);
            }
        });
        CheckReport agg = aggregate(parts.front().check_id, parts);
        pass = pass && agg.pass;
        arr.push_back(report_to_json(agg));
    }
    write_json(arr, out + "/reports/fkg.json");
    return pass ? 0 : 1;
}

// --- bound-check -------------------------------------------------------------

int run_bound_check(const RunConfig& cfg, const std::string& out) {
    const ModelParams& p = cfg.params;
    std::vector<CheckReport> four(static_cast<std::size_t>(cfg.ensemble.count));
    std::vector<CheckReport> h1(static_cast<std::size_t>(cfg.ensemble.count));
    std::vector<CheckReport> h3(static_cast<std::size_t>(cfg.ensemble.count));

    parallel_for_index(cfg.ensemble.count, cfg.workers, [&](int k) {
        const std::uint64_t seed = split_seed(cfg.ensemble.master_seed, k);
        DisorderRealization dis = sample_disorder(p, seed);
        auto model = pathintegral::compile(p, dis);
        four[k] = verify::check_four_point_bound(model, p.beta, 1e-12,
                                                 std::min(cfg.caps.enum_bits, 14));

        ModelParams q = p;
        q.b1 = 0.0;
        q.b3 = 0.0;
        for (int comp : {1, 3}) {
            auto t = verify::duhamel_vs_gibbs_overlap(q, dis, comp, cfg.caps.dim_cap);
            CheckReport r;
            r.check_id = "harris_overlap_i" + std::to_string(comp);
            r.instances = 1;
            r.tolerance = 1e-10;
            r.worst_violation =
                std::max({0.0, t.duhamel - t.gibbs, t.gibbs - t.duhamel - t.commutator_term});
            r.context = "seed=" + std::to_string(seed);
            r.finalize();
            (comp == 1 ? h1[k] : h3[k]) = r;
        }
    });

    json arr = json::array();
    bool pass = true;
    for (auto* parts : {&four, &h1, &h3}) {
        CheckReport agg = aggregate(parts->front().check_id, *parts);
        pass = pass && agg.pass;
        arr.push_back(report_to_json(agg));
    }
    write_json(arr, out + "/reports/bounds.json");
    return pass ? 0 : 1;
}

// --- gg-check ----------------------------------------------------------------

int run_gg_check(const RunConfig& cfg, const std::string& out) {
    verify::McProtocol proto;
    proto.sweeps = cfg.mc.sweeps;
    proto.thermalization = cfg.mc.thermalization;
    proto.measure_interval = cfg.mc.interval;

    if (cfg.gg_trivial) {
        auto residuals = verify::gg_trivial_residuals(cfg.params, cfg.gg_component,
                                                      cfg.ensemble.count,
                                                      cfg.ensemble.master_seed, proto,
                                                      cfg.workers);
        std::string csv = "realization,residual\n";
        double worst = 0.0;
        for (std::size_t i = 0; i < residuals.size(); ++i) {
            csv += std::to_string(i) + "," + csv17(residuals[i]) + "\n";
            worst = std::max(worst, std::abs(residuals[i]));
        }
        write_text(csv, out + "/results/gg_residuals.csv");
        CheckReport r;
        r.check_id = "gg_trivial_relabeling";
        r.instances = static_cast<int>(residuals.size());
        r.worst_violation = worst;
        r.tolerance = 1e-12;
        r.context = "n=2 f=1 component=" + std::to_string(cfg.gg_component);
        r.finalize();
        write_json(json::array({report_to_json(r)}), out + "/reports/gg.json");
        return r.pass ? 0 : 1;
    }

    auto est = verify::gg_residual(cfg.params, cfg.gg_n, cfg.gg_component, cfg.ensemble.count,
                                   cfg.ensemble.master_seed, proto, cfg.workers);
    std::string csv = "realization,seed,rho_mean,rho_sq,rho_chain,rho_disjoint\n";
    for (std::size_t i = 0; i < est.rows.size(); ++i) {
        const auto& row = est.rows[i];
        csv += std::to_string(i) + "," + std::to_string(row.seed) + "," + csv17(row.rho_mean) +
               "," + csv17(row.rho_sq) + "," + csv17(row.rho_chain) + "," +
               csv17(row.rho_disjoint) + "\n";
    }
    write_text(csv, out + "/results/gg_rows.csv");

    json j;
    j["n"] = cfg.gg_n;
    j["component"] = cfg.gg_component;
    j["n_realizations"] = est.n_realizations;
    j["residual"] = format_double17(est.residual);
    j["error"] = format_double17(est.error);
    write_json(j, out + "/reports/gg.json");
    return 0;
}

// --- scan --------------------------------------------------------------------

int run_scan(const RunConfig& cfg, const std::string& out) {
    verify::ScanTarget target = verify::scan_target_from_string(cfg.scan_target);
    auto scan = verify::variance_scan(cfg.params, cfg.l_list, cfg.ensemble.count,
                                      cfg.ensemble.master_seed, target, cfg.workers,
                                      cfg.caps.dim_cap);

    std::string csv = "L,estimate,error,n_samples\n";
    for (const auto& pt : scan.points)
        csv += std::to_string(static_cast<int>(pt.axis)) + "," + csv17(pt.estimate) + "," +
               csv17(pt.error) + "," + std::to_string(pt.n_samples) + "\n";
    write_text(csv, out + "/results/scan_" + cfg.scan_target + ".csv");

    emit_plot_data(scan, out + "/results/scan_" + cfg.scan_target + ".dat");

    json j;
    j["target"] = cfg.scan_target;
    j["axis"] = scan.axis;
    json pts = json::array();
    for (const auto& pt : scan.points) {
        json q;
        q["axis"] = pt.axis;
        q["estimate"] = format_double17(pt.estimate);
        q["error"] = format_double17(pt.error);
        q["n_samples"] = pt.n_samples;
        pts.push_back(q);
    }
    j["points"] = pts;
    if (scan.fit) {
        json f;
        f["slope"] = format_double17(scan.fit->slope);
        f["intercept"] = format_double17(scan.fit->intercept);
        f["slope_err"] = format_double17(scan.fit->slope_err);
        f["residual"] = format_double17(scan.fit->residual);
        j["fit"] = f;
    }
    write_json(j, out + "/reports/scan_" + cfg.scan_target + ".json");
    return 0;
}

} // namespace

void emit_plot_data(const verify::ScanResult& scan, const std::string& path) {
    if (scan.points.empty()) throw Error("refusing to emit an empty scan");
    std::string text = "# rsblab scan axis=" + scan.axis + " target=" + to_string(scan.target) +
                       "\n# columns: axis estimate error n_samples\n";
    for (const auto& pt : scan.points)
        text += format_double17(pt.axis) + " " + format_double17(pt.estimate) + " " +
                format_double17(pt.error) + " " + std::to_string(pt.n_samples) + "\n";
    write_text(text, path);

    if (scan.fit) {
        std::string fit = "# log-log fit: estimate ~ exp(intercept) * axis^slope\n"
                          "# columns: slope intercept slope_err residual\n";
        fit += format_double17(scan.fit->slope) + " " + format_double17(scan.fit->intercept) +
               " " + format_double17(scan.fit->slope_err) + " " +
               format_double17(scan.fit->residual) + "\n";
        write_text(fit, path + ".fit");
    } else {
        std::fprintf(stderr, "warning: no log-log fit for '%s' (estimates not positive at 2 sigma)\n",
                     path.c_str());
    }
}

int run(const RunConfig& cfg) {
    cfg.validate();
    const std::string out = cfg.out_dir;
    fs::create_directories(out);
    fs::create_directories(out + "/results");
    fs::create_directories(out + "/reports");
    fs::create_directories(out + "/disorder");
    write_resolved(cfg, out + "/config.resolved");

    if (cfg.command == "ed-check") return run_ed_check(cfg, out);
    if (cfg.command == "trotter-scan") return run_trotter_scan(cfg, out);
    if (cfg.command == "mc-run") return run_mc(cfg, out);
    if (cfg.command == "fkg-check") return run_fkg_check(cfg, out);
    if (cfg.command == "bound-check") return run_bound_check(cfg, out);
    if (cfg.command == "gg-check") return run_gg_check(cfg, out);
    if (cfg.command == "scan") return run_scan(cfg, out);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

} // namespace rsb::cli

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "rsb/core/error.hpp"
#include "rsb/core/rng.hpp"
#include "rsb/montecarlo/mc.hpp"
#include "rsb/spectral/spectral.hpp"

using namespace rsb;
using pathintegral::ClassicalModel;

namespace {

ModelParams params(int d, int L, int M, double beta = 1.0) {
    ModelParams p;
    p.d = d;
    p.L = L;
    p.M = M;
    p.beta = beta;
    return p;
}

} // namespace

TEST_CASE("heat bath: isolated spin matches tanh(beta phi)") {
    ModelParams p = params(1, 1, 1, 1.3);
    p.J3 = 1.0;
    p.c = 0.4;
    auto dis = sample_disorder(p, 3);
    ClassicalModel m = pathintegral::compile(p, dis);
    const double phi = m.site_field[0]; // self-loop excluded
    mc::HeatBath hb(m, p.beta);

    std::mt19937_64 rng(split_seed(5, 1));
    SpinConfiguration s = SpinConfiguration::all_up(1);
    const int n = 1000000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        hb.sweep(s, rng);
        acc += s.values[0];
    }
    const double mhat = acc / n;
    const double target = std::tanh(p.beta * phi);
    const double sigma = std::sqrt((1.0 - target * target) / n);
    CHECK(std::abs(mhat - target) < 4.0 * sigma);
}

TEST_CASE("heat bath: beta -> 0 gives unbiased coin flips") {
    ModelParams p = params(1, 1, 1, 1e-9);
    auto dis = sample_disorder(p, 4);
    ClassicalModel m = pathintegral::compile(p, dis);
    mc::HeatBath hb(m, p.beta);
    std::mt19937_64 rng(9);
    SpinConfiguration s = SpinConfiguration::all_up(1);
    const int n = 1000000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        hb.sweep(s, rng);
        acc += s.values[0];
    }
    CHECK(std::abs(acc / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("heat bath: flip probability table matches the direct expression") {
    ModelParams p = params(1, 2, 4, 0.9);
    p.b3 = 0.4;
    auto dis = sample_disorder(p, 8);
    ClassicalModel m = pathintegral::compile(p, dis);
    mc::HeatBath hb(m, p.beta);
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        SpinConfiguration s = SpinConfiguration::random(8, rng);
        for (int w = 0; w < 8; ++w) {
            const double direct = 1.0 / (1.0 + std::exp(-2.0 * p.beta *
                                                        pathintegral::local_field(m, s, w)));
            CHECK(hb.flip_up_probability(s, w) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("heat bath: stationary distribution on a two-site model (detailed balance)") {
    ModelParams p = params(1, 1, 2, 1.0);
    p.J3 = 0.8;
    p.c = 0.1;
    auto dis = sample_disorder(p, 12);
    ClassicalModel m = pathintegral::compile(p, dis);

    // exact Gibbs weights over the 4 configurations
    auto ex = pathintegral::exact_classical_sum(m, p.beta);
    std::map<int, double> pexact;
    for (int c0 = 0; c0 < 4; ++c0) {
        SpinConfiguration s;
        s.values = {static_cast<std::int8_t>((c0 & 1) ? 1 : -1),
                    static_cast<std::int8_t>((c0 & 2) ? 1 : -1)};
        pexact[c0] = std::exp(-p.beta * pathintegral::classical_energy(m, s));
    }
    double z = 0.0;
    for (auto& [k, v] : pexact) z += v;
    for (auto& [k, v] : pexact) v /= z;

    mc::HeatBath hb(m, p.beta);
    std::mt19937_64 rng(77);
    SpinConfiguration s = SpinConfiguration::all_up(2);
    std::map<int, std::int64_t> counts;
    const int n_samples = 100000;
    for (int i = 0; i < n_samples; ++i) {
        for (int k = 0; k < 10; ++k) hb.sweep(s, rng); // decorrelate
        int code = (s.values[0] > 0 ? 1 : 0) | (s.values[1] > 0 ? 2 : 0);
        counts[code] += 1;
    }
    for (int c0 = 0; c0 < 4; ++c0) {
        const double f = static_cast<double>(counts[c0]) / n_samples;
        const double sigma = std::sqrt(pexact[c0] * (1.0 - pexact[c0]) / n_samples);
        CHECK(std::abs(f - pexact[c0]) < 4.0 * sigma);
    }
}

TEST_CASE("mc marginals agree with exact enumeration on d=1 L=2 M=2") {
    ModelParams p = params(1, 2, 2, 1.0);
    auto dis = sample_disorder(p, 21);
    ClassicalModel m = pathintegral::compile(p, dis);
    auto ex = pathintegral::exact_classical_sum(m, p.beta);

    mc::HeatBath hb(m, p.beta);
    std::mt19937_64 rng(31);
    SpinConfiguration s = SpinConfiguration::all_up(4);
    const int n_sweeps = 200000;
    std::vector<double> acc(4, 0.0);
    std::vector<std::vector<double>> series(4);
    for (int i = 0; i < n_sweeps; ++i) {
        hb.sweep(s, rng);
        for (int w = 0; w < 4; ++w) series[w].push_back(s.values[w]);
    }
    for (int w = 0; w < 4; ++w) {
        auto est = mc::auto_binned_error(series[w]);
        CHECK(std::abs(est.value - ex.magnetization[w]) < 4.0 * est.error);
    }
}

TEST_CASE("checkerboard sweep samples the same distribution") {
    ModelParams p = params(1, 2, 4, 1.1);
    auto dis = sample_disorder(p, 22);
    ClassicalModel m = pathintegral::compile(p, dis);
    auto ex = pathintegral::exact_classical_sum(m, p.beta);

    mc::HeatBath hb(m, p.beta);
    std::mt19937_64 rng(41);
    SpinConfiguration s = SpinConfiguration::all_up(8);
    const int n_sweeps = 150000;
    std::vector<std::vector<double>> series(8);
    for (int i = 0; i < n_sweeps; ++i) {
        hb.sweep_checkerboard(s, rng);
        for (int w = 0; w < 8; ++w) series[w].push_back(s.values[w]);
    }
    for (int w = 0; w < 8; ++w) {
        auto est = mc::auto_binned_error(series[w]);
        CHECK(std::abs(est.value - ex.magnetization[w]) < 4.5 * est.error);
    }

    ModelParams podd = params(1, 2, 3);
    auto modd = pathintegral::compile(podd, sample_disorder(podd, 1));
    mc::HeatBath hodd(modd, podd.beta);
    SpinConfiguration sodd = SpinConfiguration::all_up(6);
    CHECK_THROWS_AS(hodd.sweep_checkerboard(sodd, rng), Error);
}

TEST_CASE("measure_overlaps: closed-form spot values") {
    ModelParams p = params(1, 2, 4);
    auto dis = sample_disorder(p, 2);
    ClassicalModel m = pathintegral::compile(p, dis);

    mc::ReplicaState st;
    st.configs.push_back(SpinConfiguration::all_up(8));
    st.configs.push_back(SpinConfiguration::all_up(8));

    auto ov = mc::measure_overlaps(st, m);
    REQUIRE(ov.size() == 1);
    CHECK(ov[0].rho3 == doctest::Approx(0.25).epsilon(1e-14)); // identical replicas
    CHECK(ov[0].rho1 == doctest::Approx(0.0).epsilon(1e-14));  // no kinks when all up

    // global flip of replica 2: rho3 -> -1/4, rho1 unchanged
    for (auto& v : st.configs[1].values) v = static_cast<std::int8_t>(-v);
    ov = mc::measure_overlaps(st, m);
    CHECK(ov[0].rho3 == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(ov[0].rho1 == doctest::Approx(0.0).epsilon(1e-14));

    // generic configurations: rho1 unchanged under global flip of one replica
    std::mt19937_64 rng(5);
    st.configs[0] = SpinConfiguration::random(8, rng);
    st.configs[1] = SpinConfiguration::random(8, rng);
    const double rho1_before = mc::measure_overlaps(st, m)[0].rho1;
    for (auto& v : st.configs[1].values) v = static_cast<std::int8_t>(-v);
    CHECK(mc::measure_overlaps(st, m)[0].rho1 == doctest::Approx(rho1_before).epsilon(1e-14));
}

TEST_CASE("measure_fields: closed-form spot values") {
    ModelParams p = params(1, 2, 4);
    auto dis = sample_disorder(p, 2);

    mc::ReplicaState st;
    st.configs.push_back(SpinConfiguration::all_up(8));
    st.configs.push_back(SpinConfiguration::all_up(8));

    auto f = mc::measure_fields(st, dis);
    CHECK(f.mu1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f.mu3 == doctest::Approx(0.5).epsilon(1e-14));

    // alternating in time (M even): every temporal bond is a kink
    for (int site = 0; site < 2; ++site)
        for (int t = 0; t < 4; ++t)
            for (auto& cfg : st.configs)
                cfg.values[site * 4 + t] = static_cast<std::int8_t>((t % 2 == 0) ? 1 : -1);
    f = mc::measure_fields(st, dis);
    CHECK(f.mu1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.mu3 == doctest::Approx(0.0).epsilon(1e-14));

    // h3 identically one, all spins up: h3L = sqrt(M)/2
    DisorderRealization d1 = dis;
    std::fill(d1.h3.begin(), d1.h3.end(), 1.0);
    st.configs[0] = SpinConfiguration::all_up(8);
    st.configs[1] = SpinConfiguration::all_up(8);
    f = mc::measure_fields(st, d1);
    CHECK(f.h3L == doctest::Approx(std::sqrt(4.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("run_experiment: determinism") {
    ModelParams p = params(1, 2, 2, 1.0);
    auto dis = sample_disorder(p, 51);
    auto a = mc::run_experiment(p, dis, 2, 3000, 500, 2, 99);
    auto b = mc::run_experiment(p, dis, 2, 3000, 500, 2, 99);
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        CHECK(a.series[i].name == b.series[i].name);
        CHECK(a.series[i].samples == b.series[i].samples);
        CHECK(a.series[i].sweeps == b.series[i].sweeps);
    }
    CHECK(a.meta.replica_seeds == b.meta.replica_seeds);
}

TEST_CASE("run_experiment: three replicas give exchangeable pair series") {
    ModelParams p = params(1, 2, 2, 1.0);
    auto dis = sample_disorder(p, 61);
    auto res = mc::run_experiment(p, dis, 3, 42000, 2000, 2, 7);
    const char* names[3] = {"rho3_1_2", "rho3_1_3", "rho3_2_3"};
    std::vector<mc::ErrorEstimate> est;
    for (const char* n : names) est.push_back(mc::auto_binned_error(res.find(n).samples));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double sigma = std::hypot(est[i].error, est[j].error);
            CHECK(std::abs(est[i].value - est[j].value) < 4.0 * sigma);
        }
}

TEST_CASE("run_experiment: rho3 mean matches the exact two-replica product measure") {
    ModelParams p = params(1, 2, 4, 1.0);
    auto dis = sample_disorder(p, 71);
    ClassicalModel m = pathintegral::compile(p, dis);
    auto ex = pathintegral::exact_classical_sum(m, p.beta);
    // <rho3> = (1/4|V|M) sum_w <sigma_w>^2 for independent replicas
    double expect = 0.0;
    for (double v : ex.magnetization) expect += v * v;
    expect /= 4.0 * 8;

    auto res = mc::run_experiment(p, dis, 2, 42000, 2000, 2, 5);
    auto est = mc::auto_binned_error(res.find("rho3_1_2").samples);
    CHECK(std::abs(est.value - expect) < 4.0 * est.error);
}

TEST_CASE("run_experiment: rejects a sweep budget below thermalization") {
    ModelParams p = params(1, 2, 2);
    auto dis = sample_disorder(p, 81);
    CHECK_THROWS_AS(mc::run_experiment(p, dis, 2, 100, 200, 1, 1), ConfigError);
}

TEST_CASE("run_experiment: non-finite disorder aborts with diagnostics") {
    ModelParams p = params(1, 2, 2);
    p.b3 = 0.5;
    auto dis = sample_disorder(p, 91);
    dis.h3[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mc::run_experiment(p, dis, 2, 1500, 200, 1, 1), Error);
}

TEST_CASE("stats: tau_int on an AR(1) series") {
    const double a = 0.8; // tau_int = (1+a)/(2(1-a)) = 4.5
    std::mt19937_64 rng(3);
    GaussianStream gs(17);
    std::vector<double> v(200000);
    double x = 0.0;
    for (auto& y : v) {
        x = a * x + gs.next();
        y = x;
    }
    const double tau = mc::tau_int(v);
    CHECK(tau == doctest::Approx(4.5).epsilon(0.2));
}

TEST_CASE("stats: binning plateau and the jackknife floor") {
    const double a = 0.8;
    GaussianStream gs(19);
    std::vector<double> v(100000);
    double x = 0.0;
    for (auto& y : v) {
        x = a * x + gs.next();
        y = x;
    }
    auto naive = mc::naive_error(v);
    auto binned = mc::auto_binned_error(v);
    CHECK(binned.bin_width > static_cast<int>(mc::tau_int(v)));
    CHECK(binned.error >= naive.error / std::sqrt(2.0));
    CHECK(binned.error > 1.5 * naive.error); // correlated data undersells the naive error
}

TEST_CASE("stats: delete-1 jackknife of the mean equals the standard error") {
    std::vector<double> v = {1.0, 2.0, 4.0, 8.0, 9.0, 3.0};
    auto jk = mc::jackknife_delete1(static_cast<int>(v.size()), [&](int omit) {
        double s = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (static_cast<int>(i) == omit) continue;
            s += v[i];
            ++n;
        }
        return s / n;
    });
    auto direct = mc::naive_error(v);
    CHECK(jk.value == doctest::Approx(direct.value).epsilon(1e-12));
    CHECK(jk.error == doctest::Approx(direct.error).epsilon(1e-12));
}

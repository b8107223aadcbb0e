#include "rsb/pathintegral/classical.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rsb/core/error.hpp"
#include "rsb/kernels/kernels.hpp"
#include "rsb/spectral/spectral.hpp"

namespace rsb::pathintegral {

namespace {

// beta*K from u = beta*|coeff|/M via artanh(e^-u), in the
// cancellation-free form 0.5*(log1p(e^-u) - log(-expm1(-u))).
double beta_k_from_u(double u) {
    return 0.5 * (std::log1p(std::exp(-u)) - std::log(-std::expm1(-u)));
}

// log(0.5*sinh(u)) without overflow: u - 2 log 2 + log1p(-e^{-2u}).
double log_half_sinh(double u) {
    return u - 2.0 * std::log(2.0) + std::log1p(-std::exp(-2.0 * u));
}

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

void build_connectivity(ClassicalModel& m) {
    const int mslices = m.lattice.M;
    const std::size_t nw = static_cast<std::size_t>(m.n_spacetime());
    m.spatial_bonds.clear();
    m.spatial_bonds.reserve(m.lattice.base.bonds.size() * mslices);
    for (const auto& [a, b] : m.lattice.base.bonds)
        for (int t = 1; t <= mslices; ++t)
            m.spatial_bonds.emplace_back(m.lattice.index(a, t), m.lattice.index(b, t));

    std::vector<std::vector<std::int32_t>> nb(nw);
    for (const auto& [w1, w2] : m.spatial_bonds) {
        nb[w1].push_back(w2);
        nb[w2].push_back(w1);
    }
    m.adj_offset.assign(nw + 1, 0);
    for (std::size_t w = 0; w < nw; ++w)
        m.adj_offset[w + 1] = m.adj_offset[w] + static_cast<std::int32_t>(nb[w].size());
    m.adj.resize(m.adj_offset[nw]);
    for (std::size_t w = 0; w < nw; ++w)
        std::copy(nb[w].begin(), nb[w].end(), m.adj.begin() + m.adj_offset[w]);
}

} // namespace

ClassicalModel compile(const ModelParams& p, const DisorderRealization& dis) {
    p.validate();
    if (p.beta == 0.0)
        throw ZeroTransverseField("beta = 0 makes tanh(beta K) = exp(0) = 1 unsolvable");
    const std::int64_t nv = p.n_sites();
    if (dis.g1.size() != static_cast<std::size_t>(nv) || dis.g3.size() != static_cast<std::size_t>(nv))
        throw ShapeMismatch("disorder g-fields do not match the lattice");
    const bool use_h1 = p.b1 != 0.0;
    const bool use_h3 = p.b3 != 0.0;
    const std::size_t nw = static_cast<std::size_t>(p.n_spacetime());
    if ((use_h1 && dis.h1.size() != nw) || (use_h3 && dis.h3.size() != nw))
        throw ShapeMismatch("disorder h-fields do not match the spacetime lattice");

    ClassicalModel m;
    m.lattice = build_spacetime_lattice(p);
    m.beta = p.beta;
    m.spatial_coupling = 1.0 / (4.0 * p.M);
    m.temporal_coupling.resize(nw);
    m.site_field.resize(nw);
    m.log_weight = 0.0;

    const double root_m = std::sqrt(static_cast<double>(p.M));
    for (std::int64_t x = 0; x < nv; ++x) {
        for (int t = 0; t < p.M; ++t) {
            const std::size_t w = static_cast<std::size_t>(x) * p.M + t;
            double coeff = p.J1 * dis.g1[x] + (use_h1 ? p.b1 * dis.h1[w] : 0.0);
            if (coeff == 0.0)
                throw ZeroTransverseField("transverse coefficient vanishes at site " +
                                          std::to_string(x) + ", slice " + std::to_string(t + 1));
            const double u = p.beta * std::abs(coeff) / p.M;
            m.temporal_coupling[w] = beta_k_from_u(u) / p.beta;
            m.log_weight += 0.5 * log_half_sinh(u);
            m.site_field[w] =
                (p.J3 * dis.g3[x] + (use_h3 ? p.b3 * root_m * dis.h3[w] : 0.0) + p.c) /
                (2.0 * p.M);
        }
    }

    build_connectivity(m);
    return m;
}

double classical_energy(const ClassicalModel& m, const SpinConfiguration& s) {
    const std::size_t n = static_cast<std::size_t>(m.n_spacetime());
    if (s.values.size() != n) throw ShapeMismatch("spin configuration does not match the lattice");

    std::int64_t spatial = 0;
    for (const auto& [a, b] : m.spatial_bonds)
        spatial += static_cast<int>(s.values[a]) * static_cast<int>(s.values[b]);

    std::vector<std::int8_t> prod(n);
    kern::temporal_products(s.values, prod, static_cast<std::size_t>(m.lattice.base.n_sites()),
                            static_cast<std::size_t>(m.lattice.M));
    const double temporal = kern::dot_f64_i8(m.temporal_coupling, prod);
    const double field = kern::dot_f64_i8(m.site_field, s.values);

    return -m.spatial_coupling * static_cast<double>(spatial) - temporal - field;
}

double local_field(const ClassicalModel& m, const SpinConfiguration& s, int w) {
    double phi = m.site_field[w];
    for (std::int32_t k = m.adj_offset[w]; k < m.adj_offset[w + 1]; ++k)
        phi += m.spatial_coupling * s.values[m.adj[k]];
    const int wn = m.lattice.time_next(w);
    const int wp = m.lattice.time_prev(w);
    if (wn != w) { // M = 1 self-loop contributes a constant, not a field
        phi += m.temporal_coupling[w] * s.values[wn];
        phi += m.temporal_coupling[wp] * s.values[wp];
    }
    return phi;
}

ClassicalExact exact_classical_sum(const ClassicalModel& m, double beta, bool with_pair,
                                   int cap_bits) {
    const int n = m.n_spacetime();
    if (n > cap_bits)
        throw CapExceeded("enumeration over 2^" + std::to_string(n) + " spins exceeds cap 2^" +
                          std::to_string(cap_bits));
    const std::uint64_t total = std::uint64_t{1} << n;

    SpinConfiguration s;
    s.values.assign(static_cast<std::size_t>(n), std::int8_t{-1});

    // pass 1: minimum energy along the Gray-code walk
    double e = classical_energy(m, s);
    double e_min = e;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int w = std::countr_zero(i);
        e += 2.0 * s.values[w] * local_field(m, s, w);
        s.values[w] = static_cast<std::int8_t>(-s.values[w]);
        if ((i & 0xFFFu) == 0) e = classical_energy(m, s); // shed drift
        e_min = std::min(e_min, e);
    }

    // pass 2: accumulate
    std::fill(s.values.begin(), s.values.end(), std::int8_t{-1});
    e = classical_energy(m, s);
    KahanSum z;
    std::vector<KahanSum> mag(static_cast<std::size_t>(n));
    std::vector<KahanSum> pair;
    if (with_pair) pair.resize(static_cast<std::size_t>(n) * n);

    auto accumulate = [&](double energy) {
        const double wgt = std::exp(-beta * (energy - e_min));
        z.add(wgt);
        for (int w = 0; w < n; ++w) mag[w].add(wgt * s.values[w]);
        if (with_pair) {
            for (int w = 0; w < n; ++w) {
                const double vw = wgt * s.values[w];
                for (int v = w; v < n; ++v) pair[static_cast<std::size_t>(w) * n + v].add(vw * s.values[v]);
            }
        }
    };

    accumulate(e);
    for (std::uint64_t i = 1; i < total; ++i) {
        const int w = std::countr_zero(i);
        e += 2.0 * s.values[w] * local_field(m, s, w);
        s.values[w] = static_cast<std::int8_t>(-s.values[w]);
        if ((i & 0xFFFu) == 0) e = classical_energy(m, s);
        accumulate(e);
    }

    ClassicalExact out;
    out.log_z = -beta * e_min + std::log(z.s);
    out.magnetization.resize(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) out.magnetization[w] = mag[w].s / z.s;
    if (with_pair) {
        out.has_pair = true;
        out.pair.resize(n, n);
        for (int w = 0; w < n; ++w)
            for (int v = w; v < n; ++v) {
                double val = pair[static_cast<std::size_t>(w) * n + v].s / z.s;
                out.pair(w, v) = val;
                out.pair(v, w) = val;
            }
    }
    return out;
}

std::vector<double> trotter_gap(const ModelParams& p, const DisorderRealization& dis,
                                std::span<const int> m_list, std::int64_t dim_cap,
                                int enum_cap_bits) {
    if (p.b1 != 0.0 || p.b3 != 0.0)
        throw ConfigError("trotter_gap compares against the unperturbed quantum model; "
                          "set b1 = b3 = 0");
    QuantumLattice lat = build_lattice(p);
    spectral::Operator h = spectral::build_hamiltonian(p, lat, dis,
                                                       spectral::PerturbationMode::none, dim_cap);
    const double log_zq = spectral::build_spectral(h, p.beta).log_z;

    std::vector<double> errors;
    errors.reserve(m_list.size());
    for (int m_slices : m_list) {
        ModelParams pm = p;
        pm.M = m_slices;
        ClassicalModel cm = compile(pm, dis);
        ClassicalExact ex = exact_classical_sum(cm, pm.beta, /*with_pair=*/false, enum_cap_bits);
        const double log_zm = cm.log_weight + ex.log_z;
        errors.push_back(std::abs(std::expm1(log_zm - log_zq)));
    }
    return errors;
}

using nlohmann::json;

void save_classical_model(const ClassicalModel& m, const ModelParams& p, const std::string& path) {
    json j;
    j["version"] = 1;
    j["kind"] = "classical_model";
    j["d"] = p.d;
    j["L"] = p.L;
    j["M"] = p.M;
    j["beta"] = format_double17(m.beta);
    j["spatial_coupling"] = format_double17(m.spatial_coupling);
    j["log_weight"] = format_double17(m.log_weight);
    json k = json::array(), f = json::array();
    for (double v : m.temporal_coupling) k.push_back(format_double17(v));
    for (double v : m.site_field) f.push_back(format_double17(v));
    j["temporal_coupling"] = std::move(k);
    j["site_field"] = std::move(f);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
    if (!out) throw IoError("write failed: '" + path + "'");
}

ClassicalModel load_classical_model(const std::string& path, ModelParams* params_out) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw SchemaError("unsupported schema version in '" + path + "'");
        if (j.at("kind").get<std::string>() != "classical_model")
            throw SchemaError("'" + path + "' is not a classical model file");
        ModelParams p;
        p.d = j.at("d").get<int>();
        p.L = j.at("L").get<int>();
        p.M = j.at("M").get<int>();
        p.beta = parse_double17(j.at("beta").get<std::string>());
        p.validate();

        ClassicalModel m;
        m.lattice = build_spacetime_lattice(p);
        m.beta = p.beta;
        m.spatial_coupling = parse_double17(j.at("spatial_coupling").get<std::string>());
        m.log_weight = parse_double17(j.at("log_weight").get<std::string>());
        const std::size_t nw = static_cast<std::size_t>(p.n_spacetime());
        const auto& karr = j.at("temporal_coupling");
        const auto& farr = j.at("site_field");
        if (!karr.is_array() || karr.size() != nw || !farr.is_array() || farr.size() != nw)
            throw SchemaError("coupling arrays do not match the lattice shape in '" + path + "'");
        for (const auto& v : karr) m.temporal_coupling.push_back(parse_double17(v.get<std::string>()));
        for (const auto& v : farr) m.site_field.push_back(parse_double17(v.get<std::string>()));
        build_connectivity(m);

        if (params_out) *params_out = p;
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad field in '") + path + "': " + e.what());
    }
}

} // namespace rsb::pathintegral

#include "rsb/spectral/operators.hpp"

#include <string>

#include "rsb/core/error.hpp"

namespace rsb::spectral {

using cd = std::complex<double>;

std::int64_t hilbert_dim(int n_sites, std::int64_t dim_cap) {
    if (n_sites < 1 || n_sites > 62) throw ConfigError("bad site count " + std::to_string(n_sites));
    std::int64_t dim = std::int64_t{1} << n_sites;
    if (dim > dim_cap)
        throw CapExceeded("Hilbert dimension " + std::to_string(dim) + " exceeds cap " +
                          std::to_string(dim_cap));
    return dim;
}

Operator spin_op(int component, int site, int n_sites) {
    const std::int64_t dim = hilbert_dim(n_sites);
    if (site < 0 || site >= n_sites) throw ConfigError("site index out of range");
    Operator op = Operator::Zero(dim, dim);
    const std::int64_t mask = std::int64_t{1} << site;
    switch (component) {
        case 1:
            for (std::int64_t n = 0; n < dim; ++n) op(n ^ mask, n) = cd(0.5, 0.0);
            break;
        case 2:
            // S2 |up> = (i/2)|down>, S2 |down> = (-i/2)|up>
            for (std::int64_t n = 0; n < dim; ++n)
                op(n ^ mask, n) = (n & mask) ? cd(0.0, 0.5) : cd(0.0, -0.5);
            break;
        case 3:
            for (std::int64_t n = 0; n < dim; ++n) op(n, n) = cd((n & mask) ? 0.5 : -0.5, 0.0);
            break;
        default:
            throw ConfigError("spin component must be 1, 2 or 3");
    }
    return op;
}

Operator build_hamiltonian(const ModelParams& p, const QuantumLattice& lat,
                           const DisorderRealization& dis, PerturbationMode mode,
                           std::int64_t dim_cap) {
    p.validate();
    const int nv = lat.n_sites();
    if (static_cast<std::size_t>(nv) != dis.g1.size() || dis.g1.size() != dis.g3.size())
        throw ShapeMismatch("disorder g-fields do not match the lattice");
    if (mode == PerturbationMode::none) {
        if (p.b1 != 0.0 || p.b3 != 0.0)
            throw ConfigError("unperturbed Hamiltonian requires b1 = b3 = 0");
    } else {
        if (p.b3 != 0.0)
            throw ConfigError("b3 has no quantum-side operator; only the classical "
                              "representation carries it");
        if (p.b1 != 0.0 && dis.h1.size() != static_cast<std::size_t>(nv) * p.M)
            throw ShapeMismatch("disorder h1-field does not match the spacetime lattice");
    }

    const std::int64_t dim = hilbert_dim(nv, dim_cap);
    Operator h = Operator::Zero(dim, dim);

    // Diagonal part: -sum_<xy> S3 S3 - sum_x (J3 g3 + c) S3
    for (std::int64_t n = 0; n < dim; ++n) {
        double diag = 0.0;
        for (const auto& [a, b] : lat.bonds) {
            double sa = (n >> a) & 1 ? 0.5 : -0.5;
            double sb = (n >> b) & 1 ? 0.5 : -0.5;
            diag -= sa * sb;
        }
        for (int x = 0; x < nv; ++x) {
            double sx = (n >> x) & 1 ? 0.5 : -0.5;
            diag -= (p.J3 * dis.g3[x] + p.c) * sx;
        }
        h(n, n) = diag;
    }

    // Transverse part: -sum_x coeff_x S1_x
    for (int x = 0; x < nv; ++x) {
        double coeff = p.J1 * dis.g1[x];
        if (mode == PerturbationMode::transverse_b1_only && p.b1 != 0.0) {
            double hbar = 0.0;
            for (int t = 0; t < p.M; ++t) hbar += dis.h1[static_cast<std::size_t>(x) * p.M + t];
            coeff += p.b1 * hbar / p.M;
        }
        if (coeff == 0.0) continue;
        const std::int64_t mask = std::int64_t{1} << x;
        for (std::int64_t n = 0; n < dim; ++n) {
            std::int64_t m = n ^ mask;
            if (m > n) {
                h(m, n) -= 0.5 * coeff;
                h(n, m) -= 0.5 * coeff;
            }
        }
    }
    return h;
}

Operator magnetization(int component, int n_sites, std::int64_t dim_cap) {
    const std::int64_t dim = hilbert_dim(n_sites, dim_cap);
    Operator m = Operator::Zero(dim, dim);
    for (int x = 0; x < n_sites; ++x) m += spin_op(component, x, n_sites);
    return m / static_cast<double>(n_sites);
}

Operator kron(const Operator& a, const Operator& b) {
    const auto ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    Operator out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

Operator replicate_hamiltonian(const Operator& h, std::int64_t dim_cap) {
    const auto dim = h.rows();
    if (dim * dim > dim_cap)
        throw CapExceeded("two-replica dimension " + std::to_string(dim * dim) +
                          " exceeds cap " + std::to_string(dim_cap));
    Operator eye = Operator::Identity(dim, dim);
    return kron(h, eye) + kron(eye, h);
}

Operator overlap_operator(int component, int n_sites, std::int64_t dim_cap) {
    const std::int64_t dim = hilbert_dim(n_sites);
    if (dim * dim > dim_cap)
        throw CapExceeded("two-replica dimension " + std::to_string(dim * dim) +
                          " exceeds cap " + std::to_string(dim_cap));
    Operator r = Operator::Zero(dim * dim, dim * dim);
    for (int x = 0; x < n_sites; ++x) {
        Operator s = spin_op(component, x, n_sites);
        r += kron(s, s);
    }
    return r / static_cast<double>(n_sites);
}

bool is_hermitian(const Operator& op, double tol) {
    if (op.rows() != op.cols()) return false;
    double scale = op.cwiseAbs().maxCoeff();
    return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

} // namespace rsb::spectral

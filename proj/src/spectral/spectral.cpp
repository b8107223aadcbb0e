#include "rsb/spectral/spectral.hpp"

#include <cmath>
#include <string>

#include "rsb/core/error.hpp"

namespace rsb::spectral {

using cd = std::complex<double>;

namespace {

void check_same_dim(const SpectralDecomposition& s, const Operator& o) {
    if (o.rows() != s.dim() || o.cols() != s.dim())
        throw ShapeMismatch("operator dimension " + std::to_string(o.rows()) +
                            " does not match decomposition dimension " + std::to_string(s.dim()));
}

double real_with_residue_check(cd v, const char* what) {
    double scale = std::max(1.0, std::abs(v.real()));
    if (std::abs(v.imag()) > 1e-10 * scale)
        throw Error(std::string(what) + ": imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

} // namespace

SpectralDecomposition build_spectral(const Operator& h, double beta) {
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (!is_hermitian(h)) throw Error("Hamiltonian is not Hermitian to 1e-12");

    SpectralDecomposition s;
    s.beta = beta;

    const double imag_norm = h.imag().cwiseAbs().maxCoeff();
    if (imag_norm == 0.0) {
        // the model Hamiltonian is real-symmetric in the S3 product basis
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        if (es.info() != Eigen::Success) throw Error("eigensolver failed");
        s.energies = es.eigenvalues();
        s.basis = es.eigenvectors().cast<cd>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.info() != Eigen::Success) throw Error("eigensolver failed");
        s.energies = es.eigenvalues();
        s.basis = es.eigenvectors();
    }

    const double e0 = s.energies(0);
    s.weights = (-beta * (s.energies.array() - e0)).exp();
    s.weight_sum = s.weights.sum();
    s.log_z = -beta * e0 + std::log(s.weight_sum);
    return s;
}

Operator to_eigenbasis(const SpectralDecomposition& s, const Operator& o) {
    check_same_dim(s, o);
    return s.basis.adjoint() * (o * s.basis);
}

double gibbs_expectation(const SpectralDecomposition& s, const Operator& o) {
    check_same_dim(s, o);
    // diag of U^dagger O U without forming the full product
    Eigen::MatrixXcd g = o * s.basis;
    cd acc = 0.0;
    for (Eigen::Index n = 0; n < s.dim(); ++n)
        acc += s.weights(n) * s.basis.col(n).dot(g.col(n)); // dot conjugates the left factor
    return real_with_residue_check(acc / s.weight_sum, "gibbs_expectation");
}

double duhamel_kernel_weight(double beta, double em, double en) {
    const double x = beta * (en - em);
    if (x == 0.0) return std::exp(-beta * em);
    return std::exp(-beta * em) * (-std::expm1(-x)) / x;
}

double duhamel_product(const SpectralDecomposition& s, const Operator& o1, const Operator& o2) {
    check_same_dim(s, o1);
    check_same_dim(s, o2);
    const Operator a = to_eigenbasis(s, o1);
    const Operator b = to_eigenbasis(s, o2);
    const double beta = s.beta;
    const Eigen::VectorXd e = s.energies.array() - s.energies(0);

    cd acc = 0.0;
    const Eigen::Index dim = s.dim();
    for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double x = beta * (e(n) - e(m));
            const double w = (x == 0.0) ? s.weights(m) : s.weights(m) * (-std::expm1(-x)) / x;
            acc += a(m, n) * b(n, m) * w;
        }
    }
    return real_with_residue_check(acc / s.weight_sum, "duhamel_product");
}

namespace {

// (R,R)_D on the doubled space by direct diagonalization; the expensive
// route used only as a cross-check oracle for the factorized quadrature.
double replica_duhamel_direct(const SpectralDecomposition& s, int n_sites, int component) {
    // rebuild H from the decomposition itself
    Operator h = s.basis * s.energies.asDiagonal().toDenseMatrix().cast<cd>() * s.basis.adjoint();
    Operator hrep = replicate_hamiltonian(h, s.dim() * s.dim());
    Operator r = overlap_operator(component, n_sites, s.dim() * s.dim());
    SpectralDecomposition srep = build_spectral(hrep, s.beta);
    return duhamel_product(srep, r, r);
}

} // namespace

OverlapMoments overlap_moments(const SpectralDecomposition& s, const ModelParams& p,
                               int component, const OverlapOptions& opt) {
    const int nv = static_cast<int>(p.n_sites());
    if ((std::int64_t{1} << nv) != s.dim())
        throw ShapeMismatch("params site count does not match decomposition dimension");
    if (component < 1 || component > 3) throw ConfigError("overlap component must be 1, 2 or 3");

    // transformed one-site operators
    std::vector<Operator> t;
    t.reserve(nv);
    for (int x = 0; x < nv; ++x) t.push_back(to_eigenbasis(s, spin_op(component, x, nv)));

    const double zt = s.weight_sum;
    OverlapMoments out;

    // <R> = (1/|V|) sum_x <S_x>^2
    for (int x = 0; x < nv; ++x) {
        cd m = 0.0;
        for (Eigen::Index n = 0; n < s.dim(); ++n) m += s.weights(n) * t[x](n, n);
        double mx = real_with_residue_check(m / zt, "overlap mean");
        out.mean += mx * mx;
    }
    out.mean /= nv;

    // <R^2> = (1/|V|^2) sum_xy <S_x S_y>^2
    for (int x = 0; x < nv; ++x) {
        for (int y = 0; y < nv; ++y) {
            // <S_x S_y> = (1/zt) sum_n w_n sum_k T_x(n,k) T_y(k,n)
            cd v = (t[x].cwiseProduct(t[y].conjugate()).rowwise().sum().array() *
                    s.weights.cast<cd>().array())
                       .sum();
            double sxy = real_with_residue_check(v / zt, "overlap pair");
            out.second_gibbs += sxy * sxy;
        }
    }
    out.second_gibbs /= static_cast<double>(nv) * nv;

    if (!opt.with_duhamel) return out;

    // (R,R)_D = 2 int_0^1 dtau (1-tau) (1/|V|^2) sum_xy f_xy(tau)^2,
    // f_xy(tau) = (1/zt) sum_mn e^{-beta[(1-tau) E~_m + tau E~_n]} T_x(m,n) T_y(n,m)
    std::vector<double> nodes, glw;
    gauss_legendre_01(opt.quadrature_nodes, nodes, glw);
    const Eigen::ArrayXd e = (s.energies.array() - s.energies(0));

    std::vector<Operator> t_transpose;
    t_transpose.reserve(nv);
    for (int x = 0; x < nv; ++x) t_transpose.push_back(t[x].transpose());

    cd total = 0.0;
    for (int q = 0; q < opt.quadrature_nodes; ++q) {
        const double tau = nodes[q];
        Eigen::VectorXcd lv = (-s.beta * (1.0 - tau) * e).exp().matrix().cast<cd>();
        Eigen::VectorXcd rv = (-s.beta * tau * e).exp().matrix().cast<cd>();
        std::vector<Operator> scaled;
        scaled.reserve(nv);
        for (int x = 0; x < nv; ++x)
            scaled.push_back(lv.asDiagonal() * t[x] * rv.asDiagonal());
        cd node_sum = 0.0;
        for (int x = 0; x < nv; ++x)
            for (int y = 0; y < nv; ++y) {
                cd f = scaled[x].cwiseProduct(t_transpose[y]).sum() / zt;
                node_sum += f * f;
            }
        total += 2.0 * glw[q] * (1.0 - tau) * node_sum;
    }
    double duh = real_with_residue_check(total, "overlap duhamel") / (static_cast<double>(nv) * nv);
    out.second_duhamel = duh;

    if (opt.replica_check_cap > 0 && s.dim() * s.dim() <= opt.replica_check_cap) {
        double direct = replica_duhamel_direct(s, nv, component);
        if (std::abs(direct - duh) > 1e-8 * std::max({1.0, std::abs(direct), std::abs(duh)}))
            throw Error("factorized (R,R)_D disagrees with two-replica diagonalization: " +
                        std::to_string(duh) + " vs " + std::to_string(direct));
    }
    return out;
}

HarrisTriple harris_check(const SpectralDecomposition& s, const Operator& o) {
    check_same_dim(s, o);
    const Operator a = to_eigenbasis(s, o);
    const double beta = s.beta;
    const Eigen::VectorXd e = s.energies.array() - s.energies(0);
    const double zt = s.weight_sum;
    const Eigen::Index dim = s.dim();

    double lower = 0.0, middle = 0.0, comm = 0.0;
    for (Eigen::Index m = 0; m < dim; ++m) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double a2 = std::norm(a(m, n));
            const double x = beta * (e(n) - e(m));
            const double w = (x == 0.0) ? s.weights(m) : s.weights(m) * (-std::expm1(-x)) / x;
            lower += a2 * w;
            middle += s.weights(m) * a2;
            // <[O,[H,O]]> = (1/zt) sum_mn w_m * 2 (E_n - E_m) |O_mn|^2
            comm += s.weights(m) * 2.0 * (e(n) - e(m)) * a2;
        }
    }
    lower /= zt;
    middle /= zt;
    comm /= zt;
    return HarrisTriple{lower, middle, lower + beta / 12.0 * comm};
}

double free_energy_density(const SpectralDecomposition& s, const ModelParams& p) {
    return s.log_z / static_cast<double>(p.n_sites());
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& glweights) {
    if (n < 1) throw ConfigError("quadrature order must be >= 1");
    // Golub-Welsch: eigen-decomposition of the Jacobi matrix for Legendre
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    nodes.resize(n);
    glweights.resize(n);
    for (int k = 0; k < n; ++k) {
        double x = es.eigenvalues()(k);       // node on [-1,1]
        double v0 = es.eigenvectors()(0, k);  // first component
        nodes[k] = 0.5 * (x + 1.0);
        glweights[k] = v0 * v0; // 2*v0^2 on [-1,1], halved by the map to [0,1]
    }
}

} // namespace rsb::spectral

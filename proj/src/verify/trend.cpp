#include "rsb/verify/trend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsb/core/error.hpp"

namespace rsb::verify {

namespace {

std::vector<double> ranks(std::span<const double> v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0; // average rank for ties
        for (int k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw Error("spearman needs >= 3 paired values");
    const int n = static_cast<int>(x.size());
    std::vector<double> rx = ranks(x);
    std::vector<double> ry = ranks(y);

    SpearmanResult res;
    res.rho = pearson(rx, ry);

    const double eps = 1e-12;
    if (n <= 9) {
        // exact permutation distribution of the y-ranks
        std::vector<double> perm = ry;
        std::sort(perm.begin(), perm.end());
        std::int64_t total = 0, le = 0, ge = 0;
        do {
            const double r = pearson(rx, perm);
            ++total;
            if (r <= res.rho + eps) ++le;
            if (r >= res.rho - eps) ++ge;
        } while (std::next_permutation(perm.begin(), perm.end()));
        res.p_negative = static_cast<double>(le) / total;
        res.p_positive = static_cast<double>(ge) / total;
        res.exact = true;
    } else {
        // t approximation
        const double t = res.rho * std::sqrt((n - 2) / std::max(1e-300, 1.0 - res.rho * res.rho));
        const double z = t; // adequate at the sizes used here
        const double phi = 0.5 * std::erfc(z / std::sqrt(2.0));
        res.p_negative = 1.0 - phi;
        res.p_positive = phi;
        res.exact = false;
    }
    return res;
}

WlsFit wls_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> sigma) {
    const int n = static_cast<int>(x.size());
    if (y.size() != x.size() || sigma.size() != x.size() || n < 2)
        throw Error("wls_fit needs >= 2 points with matching errors");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (int i = 0; i < n; ++i) {
        const double s = sigma[i] > 0 ? sigma[i] : 1.0;
        const double w = 1.0 / (s * s);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det == 0.0) throw Error("degenerate abscissa in wls_fit");

    WlsFit f;
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope_err = std::sqrt(sw / det);
    double chi2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = sigma[i] > 0 ? sigma[i] : 1.0;
        const double r = (y[i] - f.intercept - f.slope * x[i]) / s;
        chi2 += r * r;
    }
    f.residual = n > 2 ? chi2 / (n - 2) : 0.0;
    return f;
}

} // namespace rsb::verify

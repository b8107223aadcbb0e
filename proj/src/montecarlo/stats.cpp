#include "rsb/montecarlo/stats.hpp"

#include "rsb/core/error.hpp"

namespace rsb::mc {

double mean(std::span<const double> v) {
    if (v.empty()) throw Error("mean of empty series");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw Error("variance needs at least two samples");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

ErrorEstimate naive_error(std::span<const double> v) {
    ErrorEstimate e;
    e.value = mean(v);
    e.error = std::sqrt(variance(v) / static_cast<double>(v.size()));
    e.bin_width = 1;
    return e;
}

ErrorEstimate jackknife_binned(std::span<const double> v, int bin_width) {
    if (bin_width < 1) throw Error("bin width must be >= 1");
    const int nb = static_cast<int>(v.size()) / bin_width;
    if (nb < 2) throw Error("need at least two bins");

    std::vector<double> bins(static_cast<std::size_t>(nb), 0.0);
    for (int b = 0; b < nb; ++b) {
        double s = 0.0;
        for (int k = 0; k < bin_width; ++k) s += v[static_cast<std::size_t>(b) * bin_width + k];
        bins[b] = s / bin_width;
    }
    const double full = mean(bins);
    double var = 0.0;
    for (int b = 0; b < nb; ++b) {
        // delete-1 mean of bins
        double jb = (full * nb - bins[b]) / (nb - 1);
        var += (jb - full) * (jb - full);
    }
    var *= static_cast<double>(nb - 1) / nb;

    ErrorEstimate e;
    e.value = full;
    e.error = std::sqrt(var);
    e.bin_width = bin_width;
    return e;
}

ErrorEstimate auto_binned_error(std::span<const double> v) {
    ErrorEstimate best = jackknife_binned(v, 1);
    int width = 1;
    while (static_cast<int>(v.size()) / (2 * width) >= 4) {
        width *= 2;
        ErrorEstimate next = jackknife_binned(v, width);
        const bool plateau = next.error < 1.1 * best.error;
        best = next;
        if (plateau) break;
    }
    return best;
}

double tau_int(std::span<const double> v) {
    const int n = static_cast<int>(v.size());
    if (n < 8) return 0.5;
    const double m = mean(v);
    double c0 = 0.0;
    for (double x : v) c0 += (x - m) * (x - m);
    c0 /= n;
    if (c0 == 0.0) return 0.5;

    double tau = 0.5;
    const int wmax = n / 4;
    for (int t = 1; t <= wmax; ++t) {
        double ct = 0.0;
        for (int i = 0; i + t < n; ++i) ct += (v[i] - m) * (v[i + t] - m);
        ct /= (n - t);
        tau += ct / c0;
        if (t >= 5.0 * tau) break; // self-consistent window
    }
    return std::max(tau, 0.5);
}

ErrorEstimate jackknife_delete1(int n, const std::function<double(int)>& value_omitting) {
    if (n < 2) throw Error("jackknife needs at least two units");
    const double full = value_omitting(-1);
    std::vector<double> loo(static_cast<std::size_t>(n));
    double jbar = 0.0;
    for (int i = 0; i < n; ++i) {
        loo[i] = value_omitting(i);
        jbar += loo[i];
    }
    jbar /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (loo[i] - jbar) * (loo[i] - jbar);
    var *= static_cast<double>(n - 1) / n;

    ErrorEstimate e;
    e.value = n * full - (n - 1) * jbar; // bias-corrected
    e.error = std::sqrt(var);
    e.bin_width = 1;
    return e;
}

} // namespace rsb::mc

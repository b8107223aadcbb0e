#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rsb::mc {

// One measurement stream with its sweep stamps and the bin width chosen by
// the plateau search.
struct ObservableSeries {
    std::string name;
    std::vector<double> samples;
    std::vector<std::int64_t> sweeps;
    int bin_width = 1;
};

double mean(std::span<const double> v);
double variance(std::span<const double> v); // unbiased, n-1

struct ErrorEstimate {
    double value = 0.0;
    double error = 0.0;
    int bin_width = 1;
};

// Plain standard error of the mean, no binning.
ErrorEstimate naive_error(std::span<const double> v);

// Jackknife (delete-1 over bins of the given width) error of the mean.
ErrorEstimate jackknife_binned(std::span<const double> v, int bin_width);

// Doubles the bin width until the error changes by less than a factor 1.1,
// or the series runs out of bins.
ErrorEstimate auto_binned_error(std::span<const double> v);

// Integrated autocorrelation time with a self-consistent window
// (smallest W with W >= 5*tau_int(W)).
double tau_int(std::span<const double> v);

// Delete-1 jackknife of an arbitrary smooth statistic over n resampling
// units. `value_omitting(i)` evaluates the statistic with unit i removed;
// i = -1 means the full sample. Returns the bias-corrected estimate.
ErrorEstimate jackknife_delete1(int n, const std::function<double(int)>& value_omitting);

} // namespace rsb::mc

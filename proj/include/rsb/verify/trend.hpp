#pragma once

#include <span>
#include <vector>

namespace rsb::verify {

struct SpearmanResult {
    double rho = 0.0;
    double p_negative = 1.0; // one-sided P(rho_perm <= rho_observed)
    double p_positive = 1.0; // one-sided P(rho_perm >= rho_observed)
    bool exact = false;      // exact permutation distribution (n <= 9)
};

SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct WlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double residual = 0.0; // chi^2 per degree of freedom (0 when dof = 0)
};

// Weighted least squares y = a + b x with weights 1/sigma^2.
WlsFit wls_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> sigma);

} // namespace rsb::verify

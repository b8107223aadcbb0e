#include "rsb/kernels/kernels.hpp"

namespace rsb::kern {

namespace {

std::int64_t sum_i8_scalar(const std::int8_t* a, std::size_t n) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

std::int64_t dot_i8_scalar(const std::int8_t* a, const std::int8_t* b, std::size_t n) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<int>(a[i]) * static_cast<int>(b[i]);
    return s;
}

double dot_f64_i8_scalar(const double* a, const std::int8_t* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * static_cast<double>(b[i]);
    return s;
}

void temporal_products_scalar(const std::int8_t* s, std::int8_t* out, std::size_t rows,
                              std::size_t period) {
    for (std::size_t r = 0; r < rows; ++r) {
        const std::int8_t* row = s + r * period;
        std::int8_t* o = out + r * period;
        for (std::size_t t = 0; t + 1 < period; ++t)
            o[t] = static_cast<std::int8_t>(row[t] * row[t + 1]);
        o[period - 1] = static_cast<std::int8_t>(row[period - 1] * row[0]);
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{sum_i8_scalar, dot_i8_scalar, dot_f64_i8_scalar,
                               temporal_products_scalar, "scalar"};
    return t;
}

} // namespace rsb::kern

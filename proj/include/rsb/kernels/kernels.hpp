#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rsb::kern {

// Hot inner loops over spin arrays. Integer kernels take values in
// {-1, 0, +1} and are exact; the mixed double/int8 kernel accumulates in
// double, so scalar and SIMD variants may differ by summation order only.
//
// temporal_products treats the input as `rows` contiguous rows of length
// `period` and writes out[i] = s[i] * s[i_next], where i_next is the next
// index within the same row, wrapping periodically. With the site-major
// spacetime layout this is sigma_{x,t} * sigma_{x,t+1}.
struct KernelTable {
    std::int64_t (*sum_i8)(const std::int8_t*, std::size_t);
    std::int64_t (*dot_i8)(const std::int8_t*, const std::int8_t*, std::size_t);
    double (*dot_f64_i8)(const double*, const std::int8_t*, std::size_t);
    void (*temporal_products)(const std::int8_t*, std::int8_t*, std::size_t rows,
                              std::size_t period);
    const char* name;
};

const KernelTable& scalar_table();

#if defined(__x86_64__)
bool avx2_available();
const KernelTable& avx2_table(); // call only if avx2_available()
#endif

// Active table: best available backend, chosen once at first use.
// force_backend("scalar"|"avx2"|"auto") overrides it; throws rsb::Error for
// an unavailable backend. Intended for tests and benchmarking.
const KernelTable& active();
void force_backend(std::string_view name);

inline std::int64_t sum_i8(std::span<const std::int8_t> a) {
    return active().sum_i8(a.data(), a.size());
}
inline std::int64_t dot_i8(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
    return active().dot_i8(a.data(), b.data(), a.size());
}
inline double dot_f64_i8(std::span<const double> a, std::span<const std::int8_t> b) {
    return active().dot_f64_i8(a.data(), b.data(), a.size());
}
inline void temporal_products(std::span<const std::int8_t> s, std::span<std::int8_t> out,
                              std::size_t rows, std::size_t period) {
    active().temporal_products(s.data(), out.data(), rows, period);
}

} // namespace rsb::kern

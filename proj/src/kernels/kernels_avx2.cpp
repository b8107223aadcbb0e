#if defined(__x86_64__)

#include <immintrin.h>

#include "rsb/kernels/kernels.hpp"

namespace rsb::kern {

namespace {

inline std::int64_t hsum_epi64(__m256i v) {
    __m128i lo = _mm256_castsi256_si128(v);
    __m128i hi = _mm256_extracti128_si256(v, 1);
    __m128i s = _mm_add_epi64(lo, hi);
    return _mm_cvtsi128_si64(s) + _mm_extract_epi64(s, 1);
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sum of bytes in {-1,0,1}: bias to {0,1,2} and use the unsigned
// byte-sum-of-absolute-differences reduction, then subtract the bias.
std::int64_t sum_i8_avx2(const std::int8_t* a, std::size_t n) {
    const __m256i one = _mm256_set1_epi8(1);
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0, chunks = 0;
    for (; i + 32 <= n; i += 32, ++chunks) {
        __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(_mm256_add_epi8(x, one), zero));
    }
    std::int64_t s = hsum_epi64(acc) - 32 * static_cast<std::int64_t>(chunks);
    for (; i < n; ++i) s += a[i];
    return s;
}

std::int64_t dot_i8_avx2(const std::int8_t* a, const std::int8_t* b, std::size_t n) {
    const __m256i one = _mm256_set1_epi8(1);
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0, chunks = 0;
    for (; i + 32 <= n; i += 32, ++chunks) {
        __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        // x*y for values in {-1,0,1}
        __m256i p = _mm256_sign_epi8(x, y);
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(_mm256_add_epi8(p, one), zero));
    }
    std::int64_t s = hsum_epi64(acc) - 32 * static_cast<std::int64_t>(chunks);
    for (; i < n; ++i) s += static_cast<int>(a[i]) * static_cast<int>(b[i]);
    return s;
}

double dot_f64_i8_avx2(const double* a, const std::int8_t* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i b8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b + i));
        __m256i b32 = _mm256_cvtepi8_epi32(b8);
        __m256d d0 = _mm256_cvtepi32_pd(_mm256_castsi256_si128(b32));
        __m256d d1 = _mm256_cvtepi32_pd(_mm256_extracti128_si256(b32, 1));
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), d0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), d1, acc1);
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * static_cast<double>(b[i]);
    return s;
}

void temporal_products_avx2(const std::int8_t* s, std::int8_t* out, std::size_t rows,
                            std::size_t period) {
    const std::size_t n = rows * period;
    // Bulk pass: out[i] = s[i]*s[i+1]; row wrap entries fixed afterwards.
    std::size_t i = 0;
    if (n >= 33) {
        for (; i + 32 <= n - 1; i += 32) {
            __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i));
            __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i + 1));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_sign_epi8(x, y));
        }
    }
    for (; i + 1 < n; ++i) out[i] = static_cast<std::int8_t>(s[i] * s[i + 1]);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t last = r * period + period - 1;
        out[last] = static_cast<std::int8_t>(s[last] * s[r * period]);
    }
}

} // namespace

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable& avx2_table() {
    static const KernelTable t{sum_i8_avx2, dot_i8_avx2, dot_f64_i8_avx2, temporal_products_avx2,
                               "avx2"};
    return t;
}

} // namespace rsb::kern

#endif // __x86_64__

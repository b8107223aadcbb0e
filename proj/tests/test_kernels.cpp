#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "rsb/kernels/kernels.hpp"

using namespace rsb;

namespace {

std::vector<std::int8_t> random_ternary(std::size_t n, std::mt19937_64& rng, bool with_zero) {
    std::vector<std::int8_t> v(n);
    for (auto& x : v) {
        int r = static_cast<int>(rng() % (with_zero ? 3 : 2));
        x = with_zero ? static_cast<std::int8_t>(r - 1) : static_cast<std::int8_t>(r * 2 - 1);
    }
    return v;
}

std::vector<const kern::KernelTable*> backends() {
    std::vector<const kern::KernelTable*> out{&kern::scalar_table()};
#if defined(__x86_64__)
    if (kern::avx2_available()) out.push_back(&kern::avx2_table());
#endif
    return out;
}

} // namespace

TEST_CASE("integer kernels agree with the scalar reference exactly") {
    std::mt19937_64 rng(7);
    const auto& ref = kern::scalar_table();
    for (const auto* table : backends()) {
        for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{5}, std::size_t{31},
                              std::size_t{32}, std::size_t{33}, std::size_t{64}, std::size_t{65},
                              std::size_t{127}, std::size_t{1000}, std::size_t{4097}}) {
            for (bool with_zero : {false, true}) {
                auto a = random_ternary(n, rng, with_zero);
                auto b = random_ternary(n, rng, with_zero);
                CHECK(table->sum_i8(a.data(), n) == ref.sum_i8(a.data(), n));
                CHECK(table->dot_i8(a.data(), b.data(), n) == ref.dot_i8(a.data(), b.data(), n));
            }
        }
    }
}

TEST_CASE("dot_f64_i8 agrees up to summation order") {
    std::mt19937_64 rng(11);
    const auto& ref = kern::scalar_table();
    for (const auto* table : backends()) {
        for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{8}, std::size_t{9},
                              std::size_t{64}, std::size_t{1001}}) {
            std::vector<double> a(n);
            double abs_sum = 0.0;
            for (auto& x : a) {
                x = std::ldexp(static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5, 3);
                abs_sum += std::abs(x);
            }
            auto b = random_ternary(n, rng, true);
            const double got = table->dot_f64_i8(a.data(), b.data(), n);
            const double want = ref.dot_f64_i8(a.data(), b.data(), n);
            CHECK(std::abs(got - want) <= 1e-12 * (abs_sum + 1.0));
        }
    }
}

TEST_CASE("temporal_products: wraparound per row") {
    // rows=2, period=3, hand-checked
    std::vector<std::int8_t> s = {+1, -1, -1, /*row 2*/ -1, +1, -1};
    for (const auto* table : backends()) {
        std::vector<std::int8_t> out(6, 0);
        table->temporal_products(s.data(), out.data(), 2, 3);
        CHECK(out[0] == -1); // s0*s1
        CHECK(out[1] == +1); // s1*s2
        CHECK(out[2] == -1); // s2*s0 (wrap)
        CHECK(out[3] == -1);
        CHECK(out[4] == -1);
        CHECK(out[5] == +1);
    }
}

TEST_CASE("temporal_products: backends agree on random shapes") {
    std::mt19937_64 rng(13);
    const auto& ref = kern::scalar_table();
    for (const auto* table : backends()) {
        for (auto [rows, period] : std::vector<std::pair<std::size_t, std::size_t>>{
                 {1, 1}, {1, 2}, {3, 5}, {4, 33}, {7, 8}, {2, 64}, {5, 17}}) {
            auto s = random_ternary(rows * period, rng, false);
            std::vector<std::int8_t> got(rows * period), want(rows * period);
            table->temporal_products(s.data(), got.data(), rows, period);
            ref.temporal_products(s.data(), want.data(), rows, period);
            CHECK(got == want);
        }
    }
}

TEST_CASE("kernel semantics on +-1 arrays") {
    std::mt19937_64 rng(17);
    auto a = random_ternary(257, rng, false);
    auto b = random_ternary(257, rng, false);
    // self-dot counts entries; symmetry
    CHECK(kern::dot_i8(a, a) == 257);
    CHECK(kern::dot_i8(a, b) == kern::dot_i8(b, a));
}

TEST_CASE("force_backend switches the active table") {
    kern::force_backend("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
    kern::force_backend("auto");
#if defined(__x86_64__)
    if (kern::avx2_available()) CHECK(std::string(kern::active().name) == "avx2");
#endif
    CHECK_THROWS(kern::force_backend("no-such-backend"));
}

#include <doctest.h>

#include <cmath>
#include <functional>

#include "simaudit/rng.hpp"
#include "simaudit/statkit.hpp"

// Null calibration: with data generated under each test's null hypothesis,
// p < 0.05 must occur in 3-7% of 1,000 seeded trials.

using namespace simaudit;
using namespace simaudit::stats;

namespace {

std::vector<double> normals(Rng& rng, int n, double sd = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = sd * rng.next_normal();
    return v;
}

int count_rejections(int trials, const std::function<double(Rng&)>& p_of_trial,
                     std::uint64_t seed) {
    int rejections = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
        if (p_of_trial(rng) < 0.05) ++rejections;
    }
    return rejections;
}

constexpr int kTrials = 1000;
constexpr int kLow = 30;   // 3%
constexpr int kHigh = 70;  // 7%

}  // namespace

TEST_SUITE_BEGIN("statkit_null");

TEST_CASE("levene null calibration") {
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) {
            std::vector<Sample> groups;
            for (int g = 0; g < 3; ++g) groups.push_back({normals(rng, 60), ""});
            return levene_test(groups).p_value;
        },
        0xA11CEull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_CASE("levene null calibration holds at n = 200 in nearly all trials") {
    // Three same-law groups, n = 200, p > 0.05 in at least 90 of 100
    // seeded trials.
    int nonsignificant = 0;
    for (int t = 0; t < 100; ++t) {
        Rng rng(derive_seed(0xB0B5EEDull, {static_cast<std::uint64_t>(t)}));
        std::vector<Sample> groups;
        for (int g = 0; g < 3; ++g) groups.push_back({normals(rng, 200), ""});
        if (levene_test(groups).p_value > 0.05) ++nonsignificant;
    }
    CHECK(nonsignificant >= 90);
}

TEST_CASE("chisq_variance null calibration") {
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) { return chisq_variance_test({normals(rng, 100), ""}, 1.0).p_value; },
        0xC0FFEEull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_CASE("f_ratio null calibration") {
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) {
            return f_ratio_test({normals(rng, 50), ""}, {normals(rng, 50), ""}).p_value;
        },
        0xFACADEull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_CASE("paired_t null calibration") {
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) {
            Sample x{normals(rng, 40), ""};
            Sample y = x;
            for (auto& v : y.values) v += rng.next_normal();  // zero-mean paired noise
            return paired_t(x, y).test.p_value;
        },
        0x7EA5E7ull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_CASE("dunn null calibration") {
    // First pairwise contrast of three same-law groups.
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) {
            std::vector<Sample> groups;
            for (int g = 0; g < 3; ++g) groups.push_back({normals(rng, 40), ""});
            return dunn_posthoc(groups)[0].test.p_value;
        },
        0xD1CEull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_CASE("kruskal_wallis null calibration") {
    const int r = count_rejections(
        kTrials,
        [](Rng& rng) {
            std::vector<Sample> groups;
            for (int g = 0; g < 4; ++g) {
                Sample s;
                for (int i = 0; i < 30; ++i) s.values.push_back(rng.next_double());
                groups.push_back(std::move(s));
            }
            return kruskal_wallis(groups).p_value;
        },
        0xD00Dull);
    CHECK(r >= kLow);
    CHECK(r <= kHigh);
}

TEST_SUITE_END();

#pragma once

// Self-contained statistical kernel: descriptive statistics, the dispersion
// and location tests used by the audits, rank-based tests with tie handling,
// effect sizes, multiple-comparison corrections, correlation matrices.
//
// Distribution tails (normal, chi-square, F, t) are computed from
// incomplete-gamma / incomplete-beta evaluations implemented in statkit.cpp;
// no external numerical library is required.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace simaudit::stats {

// ============================================================================
// TYPES
// ============================================================================

struct Sample {
    std::vector<double> values;
    std::string label;

    std::size_t n() const { return values.size(); }
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df1 = 0.0;          // primary degrees of freedom (k-1, n-1, ...)
    double df2 = 0.0;          // secondary df where applicable (N-k, denominator df)
    std::string method;
    bool degenerate = false;   // statistic undefined by convention, reported as (0, 1)
};

// paired_t carries the drift decomposition alongside the test.
struct PairedResult {
    TestResult test;
    double mean_diff = 0.0;
    double mean_abs_diff = 0.0;
};

enum class EffectKind { CohensD, CliffsDelta, PearsonR };

struct EffectSize {
    EffectKind kind = EffectKind::CohensD;
    double value = 0.0;
};

struct Descriptive {
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> sd;  // absent when n < 2
    double median = 0.0;

    // Throwing accessor for callers that require a dispersion estimate.
    double sd_value() const;
};

struct PairwiseTest {
    std::size_t group_a = 0;
    std::size_t group_b = 0;
    TestResult test;
};

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct FdrResult {
    std::vector<bool> reject;
    std::vector<double> adjusted;
};

enum class LeveneCenter { Mean, Median };

// ============================================================================
// DISTRIBUTION TAILS
// ============================================================================

// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) (upper).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b).
double beta_inc(double a, double b, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);
double f_sf(double x, double df1, double df2);
// Two-sided p for a t statistic.
double t_two_sided(double t, double df);

// One-sided upper normal tail P(Z >= z).
double p_from_z(double z);

// ============================================================================
// DESCRIPTIVE AND TWO-SAMPLE MACHINERY
// ============================================================================

Descriptive descriptive(const Sample& s);

double mean_of(const std::vector<double>& v);
// Sample standard deviation, n-1 denominator; requires n >= 2.
double sd_of(const std::vector<double>& v);
double median_of(std::vector<double> v);

// Levene's W for equality of variances across >= 2 groups, each n >= 2.
// center = Mean is the classic test; Median gives the Brown-Forsythe variant.
TestResult levene_test(const std::vector<Sample>& groups, LeveneCenter center = LeveneCenter::Mean);

// Chi-square test of a sample variance against a fixed sigma0 (two-sided).
// Used when the comparison population provides only a summary SD.
TestResult chisq_variance_test(const Sample& s, double sigma0);

// Variance-ratio F test, two-sided, larger variance in the numerator.
TestResult f_ratio_test(const Sample& s1, const Sample& s2);

EffectSize pearson_r(const Sample& x, const Sample& y);

PairedResult paired_t(const Sample& x, const Sample& y);

// ============================================================================
// RANK TESTS
// ============================================================================

TestResult kruskal_wallis(const std::vector<Sample>& groups);

// Pairwise Dunn z tests on mean ranks with tie-corrected variance.
// z is signed as (mean rank of the later group) - (mean rank of the earlier
// group); p values are raw two-sided, correction is the caller's job.
std::vector<PairwiseTest> dunn_posthoc(const std::vector<Sample>& groups);

EffectSize cliffs_delta(const Sample& x, const Sample& y);

EffectSize cohens_d_one_sample(double sample_mean, double sample_sd, double ref_mean);

// ============================================================================
// MULTIPLE COMPARISONS
// ============================================================================

// Benjamini-Hochberg step-up; adjusted p values are monotone-enforced.
FdrResult bh_fdr(const std::vector<double>& pvals, double alpha);

std::vector<double> bonferroni(const std::vector<double>& pvals);

// ============================================================================
// CORRELATION MATRICES
// ============================================================================

// Pairwise Pearson over equal-length columns; symmetric, unit diagonal.
// A zero-variance column is an error naming the column index.
Matrix correlation_matrix(const std::vector<Sample>& columns);

double frobenius_distance(const Matrix& a, const Matrix& b);

// Midranks of pooled values (average rank for ties); helper shared by the
// rank tests, exposed for testing.
std::vector<double> midranks(const std::vector<double>& pooled);

}  // namespace simaudit::stats

#include "simaudit/statkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace simaudit::stats {

namespace {

constexpr double kEps = 1e-14;
// The gamma series needs ~8*sqrt(a) terms when x is near a; cohort-scale
// degrees of freedom reach ~14,000, so the cap is sized for that.
constexpr int kMaxIter = 2000;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void require_finite(const std::vector<double>& v, const char* who) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite value");
    }
}

// Lanczos g=7, n=9 coefficients.
double log_gamma(double x) {
    static constexpr double kCoeff[9] = {
        0.99999999999980993,   676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = kCoeff[0];
    for (int i = 1; i < 9; ++i) a += kCoeff[i] / (x + i);
    const double t = x + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1 (Lentz).
double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

// ============================================================================
// DISTRIBUTION TAILS
// ============================================================================

double gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, "gamma_p: a > 0 and x >= 0 required");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, "gamma_q: a > 0 and x >= 0 required");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double beta_inc(double a, double b, double x) {
    require(a > 0.0 && b > 0.0, "beta_inc: a, b > 0 required");
    require(x >= 0.0 && x <= 1.0, "beta_inc: x in [0,1] required");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const bool flip = x > (a + 1.0) / (a + b + 2.0);
    if (flip) {
        std::swap(a, b);
        x = 1.0 - x;
    }

    // Lentz continued fraction.
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                                  a * std::log(x) + b * std::log(1.0 - x));
    const double result = front * h / a;
    return flip ? 1.0 - result : result;
}

double chi2_cdf(double x, double df) {
    require(df > 0.0, "chi2_cdf: df > 0 required");
    if (x <= 0.0) return 0.0;
    return gamma_p(df / 2.0, x / 2.0);
}

double chi2_sf(double x, double df) {
    require(df > 0.0, "chi2_sf: df > 0 required");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double f_sf(double x, double df1, double df2) {
    require(df1 > 0.0 && df2 > 0.0, "f_sf: df > 0 required");
    if (x <= 0.0) return 1.0;
    return beta_inc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x));
}

double t_two_sided(double t, double df) {
    require(df > 0.0, "t_two_sided: df > 0 required");
    return beta_inc(df / 2.0, 0.5, df / (df + t * t));
}

double p_from_z(double z) {
    require(std::isfinite(z), "p_from_z: finite z required");
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// ============================================================================
// DESCRIPTIVE
// ============================================================================

double Descriptive::sd_value() const {
    if (!sd.has_value()) throw std::invalid_argument("sd requires n >= 2");
    return *sd;
}

double mean_of(const std::vector<double>& v) {
    require(!v.empty(), "mean: empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    require(v.size() >= 2, "sd: n >= 2 required");
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    require(!v.empty(), "median: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Descriptive descriptive(const Sample& s) {
    require(!s.values.empty(), "descriptive: n >= 1 required");
    require_finite(s.values, "descriptive");
    Descriptive d;
    d.n = s.n();
    d.mean = mean_of(s.values);
    d.median = median_of(s.values);
    if (d.n >= 2) d.sd = sd_of(s.values);
    return d;
}

// ============================================================================
// VARIANCE TESTS
// ============================================================================

TestResult levene_test(const std::vector<Sample>& groups, LeveneCenter center) {
    require(groups.size() >= 2, "levene: >= 2 groups required");
    const std::size_t k = groups.size();
    std::size_t total = 0;
    std::vector<std::vector<double>> z(k);
    for (std::size_t i = 0; i < k; ++i) {
        require(groups[i].n() >= 2, "levene: every group needs n >= 2");
        require_finite(groups[i].values, "levene");
        total += groups[i].n();
        const double c = (center == LeveneCenter::Mean) ? mean_of(groups[i].values)
                                                        : median_of(std::vector<double>(groups[i].values));
        z[i].reserve(groups[i].n());
        for (double x : groups[i].values) z[i].push_back(std::abs(x - c));
    }
    const double nd = static_cast<double>(total);

    double grand = 0.0;
    std::vector<double> zbar(k);
    for (std::size_t i = 0; i < k; ++i) {
        zbar[i] = mean_of(z[i]);
        grand += zbar[i] * static_cast<double>(z[i].size());
    }
    grand /= nd;

    double between = 0.0;
    double within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        between += static_cast<double>(z[i].size()) * (zbar[i] - grand) * (zbar[i] - grand);
        for (double zz : z[i]) within += (zz - zbar[i]) * (zz - zbar[i]);
    }

    TestResult r;
    r.method = (center == LeveneCenter::Mean) ? "levene_mean" : "levene_median";
    r.df1 = static_cast<double>(k - 1);
    r.df2 = nd - static_cast<double>(k);
    if (within == 0.0) {
        if (between == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
            r.degenerate = true;
            return r;
        }
        throw std::invalid_argument("levene: zero within-group deviation with unequal centers");
    }
    r.statistic = (r.df2 / r.df1) * (between / within);
    r.p_value = f_sf(r.statistic, r.df1, r.df2);
    return r;
}

TestResult chisq_variance_test(const Sample& s, double sigma0) {
    require(s.n() >= 2, "chisq_variance: n >= 2 required");
    require(sigma0 > 0.0, "chisq_variance: sigma0 > 0 required");
    require_finite(s.values, "chisq_variance");
    const double n = static_cast<double>(s.n());
    const double sdev = sd_of(s.values);
    TestResult r;
    r.method = "chisq_variance";
    r.df1 = n - 1.0;
    r.statistic = (n - 1.0) * (sdev * sdev) / (sigma0 * sigma0);
    const double lower = chi2_cdf(r.statistic, r.df1);
    const double upper = chi2_sf(r.statistic, r.df1);
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    return r;
}

TestResult f_ratio_test(const Sample& s1, const Sample& s2) {
    require(s1.n() >= 2 && s2.n() >= 2, "f_ratio: both n >= 2 required");
    require_finite(s1.values, "f_ratio");
    require_finite(s2.values, "f_ratio");
    const double v1 = sd_of(s1.values) * sd_of(s1.values);
    const double v2 = sd_of(s2.values) * sd_of(s2.values);
    require(v1 > 0.0 && v2 > 0.0, "f_ratio: zero variance");

    TestResult r;
    r.method = "f_ratio";
    if (v1 >= v2) {
        r.statistic = v1 / v2;
        r.df1 = static_cast<double>(s1.n() - 1);
        r.df2 = static_cast<double>(s2.n() - 1);
    } else {
        r.statistic = v2 / v1;
        r.df1 = static_cast<double>(s2.n() - 1);
        r.df2 = static_cast<double>(s1.n() - 1);
    }
    r.p_value = std::min(1.0, 2.0 * f_sf(r.statistic, r.df1, r.df2));
    return r;
}

// ============================================================================
// CORRELATION AND PAIRED COMPARISON
// ============================================================================

EffectSize pearson_r(const Sample& x, const Sample& y) {
    require(x.n() == y.n(), "pearson_r: equal lengths required");
    require(x.n() >= 2, "pearson_r: n >= 2 required");
    require_finite(x.values, "pearson_r");
    require_finite(y.values, "pearson_r");
    const double mx = mean_of(x.values);
    const double my = mean_of(y.values);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.n(); ++i) {
        const double dx = x.values[i] - mx;
        const double dy = y.values[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    require(sxx > 0.0 && syy > 0.0, "pearson_r: constant input");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return {EffectKind::PearsonR, r};
}

PairedResult paired_t(const Sample& x, const Sample& y) {
    require(x.n() == y.n(), "paired_t: equal lengths required");
    require(x.n() >= 2, "paired_t: n >= 2 required");
    require_finite(x.values, "paired_t");
    require_finite(y.values, "paired_t");
    const std::size_t n = x.n();
    std::vector<double> diffs(n);
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i] = x.values[i] - y.values[i];
        abs_sum += std::abs(diffs[i]);
    }
    PairedResult out;
    out.mean_diff = mean_of(diffs);
    out.mean_abs_diff = abs_sum / static_cast<double>(n);
    out.test.method = "paired_t";
    out.test.df1 = static_cast<double>(n - 1);

    const double sdev = sd_of(diffs);
    if (sdev == 0.0) {
        if (out.mean_diff == 0.0) {
            out.test.statistic = 0.0;
            out.test.p_value = 1.0;
            return out;
        }
        throw std::invalid_argument("paired_t: zero-variance differences with nonzero mean");
    }
    out.test.statistic = out.mean_diff / (sdev / std::sqrt(static_cast<double>(n)));
    out.test.p_value = t_two_sided(out.test.statistic, out.test.df1);
    return out;
}

// ============================================================================
// RANK TESTS
// ============================================================================

std::vector<double> midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // Average of ranks i+1 .. j+1 (1-based).
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

struct RankLayout {
    std::vector<double> ranks;        // pooled midranks
    std::vector<std::size_t> sizes;   // group sizes
    std::vector<std::size_t> offsets; // start of each group in the pooled vector
    double tie_sum = 0.0;             // sum over tie groups of (t^3 - t)
    std::size_t total = 0;
};

RankLayout rank_groups(const std::vector<Sample>& groups) {
    RankLayout lay;
    std::vector<double> pooled;
    for (const auto& g : groups) {
        require_finite(g.values, "rank test");
        lay.offsets.push_back(pooled.size());
        lay.sizes.push_back(g.n());
        pooled.insert(pooled.end(), g.values.begin(), g.values.end());
    }
    lay.total = pooled.size();
    lay.ranks = midranks(pooled);

    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) lay.tie_sum += t * t * t - t;
        i = j + 1;
    }
    return lay;
}

}  // namespace

TestResult kruskal_wallis(const std::vector<Sample>& groups) {
    require(groups.size() >= 2, "kruskal_wallis: >= 2 groups required");
    for (const auto& g : groups) require(g.n() >= 1, "kruskal_wallis: empty group");
    const RankLayout lay = rank_groups(groups);
    const double n = static_cast<double>(lay.total);
    require(lay.total >= 3, "kruskal_wallis: total N >= 3 required");

    TestResult r;
    r.method = "kruskal_wallis";
    r.df1 = static_cast<double>(groups.size() - 1);

    const double tie_correction = 1.0 - lay.tie_sum / (n * n * n - n);
    if (tie_correction <= 0.0) {
        // Every value identical.
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.degenerate = true;
        return r;
    }

    double sum_r2 = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double rank_sum = 0.0;
        for (std::size_t k = 0; k < lay.sizes[g]; ++k) rank_sum += lay.ranks[lay.offsets[g] + k];
        sum_r2 += rank_sum * rank_sum / static_cast<double>(lay.sizes[g]);
    }
    const double h_raw = 12.0 / (n * (n + 1.0)) * sum_r2 - 3.0 * (n + 1.0);
    r.statistic = h_raw / tie_correction;
    if (r.statistic < 0.0 && r.statistic > -1e-12) r.statistic = 0.0;
    r.p_value = chi2_sf(r.statistic, r.df1);
    return r;
}

std::vector<PairwiseTest> dunn_posthoc(const std::vector<Sample>& groups) {
    require(groups.size() >= 2, "dunn: >= 2 groups required");
    for (const auto& g : groups) require(g.n() >= 1, "dunn: empty group");
    const RankLayout lay = rank_groups(groups);
    const double n = static_cast<double>(lay.total);
    require(lay.total >= 3, "dunn: total N >= 3 required");

    std::vector<double> mean_rank(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double s = 0.0;
        for (std::size_t k = 0; k < lay.sizes[g]; ++k) s += lay.ranks[lay.offsets[g] + k];
        mean_rank[g] = s / static_cast<double>(lay.sizes[g]);
    }

    const double var_core = n * (n + 1.0) / 12.0 - lay.tie_sum / (12.0 * (n - 1.0));
    std::vector<PairwiseTest> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            PairwiseTest p;
            p.group_a = i;
            p.group_b = j;
            p.test.method = "dunn";
            const double se2 = var_core * (1.0 / static_cast<double>(lay.sizes[i]) +
                                           1.0 / static_cast<double>(lay.sizes[j]));
            if (se2 <= 0.0) {
                p.test.statistic = 0.0;
                p.test.p_value = 1.0;
                p.test.degenerate = true;
            } else {
                p.test.statistic = (mean_rank[j] - mean_rank[i]) / std::sqrt(se2);
                p.test.p_value = std::min(1.0, 2.0 * p_from_z(std::abs(p.test.statistic)));
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

EffectSize cliffs_delta(const Sample& x, const Sample& y) {
    require(!x.values.empty() && !y.values.empty(), "cliffs_delta: both samples nonempty");
    require_finite(x.values, "cliffs_delta");
    require_finite(y.values, "cliffs_delta");
    std::vector<double> ys(y.values);
    std::sort(ys.begin(), ys.end());
    long long net = 0;
    for (double xv : x.values) {
        const auto lo = std::lower_bound(ys.begin(), ys.end(), xv);
        const auto hi = std::upper_bound(ys.begin(), ys.end(), xv);
        const long long less = lo - ys.begin();              // y < x  -> x wins
        const long long greater = ys.end() - hi;             // y > x  -> y wins
        net += less - greater;
    }
    const double delta = static_cast<double>(net) /
                         (static_cast<double>(x.n()) * static_cast<double>(y.n()));
    return {EffectKind::CliffsDelta, delta};
}

EffectSize cohens_d_one_sample(double sample_mean, double sample_sd, double ref_mean) {
    require(sample_sd > 0.0, "cohens_d: sd > 0 required");
    return {EffectKind::CohensD, (sample_mean - ref_mean) / sample_sd};
}

// ============================================================================
// MULTIPLE COMPARISONS
// ============================================================================

FdrResult bh_fdr(const std::vector<double>& pvals, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "bh_fdr: alpha in (0,1) required");
    const std::size_t m = pvals.size();
    for (double p : pvals) require(p >= 0.0 && p <= 1.0, "bh_fdr: p outside [0,1]");

    FdrResult out;
    out.reject.assign(m, false);
    out.adjusted.assign(m, 0.0);
    if (m == 0) return out;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });

    // Step-up: largest k with p_(k) <= k*alpha/m; reject ranks 1..k.
    std::size_t cutoff = 0;
    for (std::size_t k = m; k >= 1; --k) {
        if (pvals[order[k - 1]] <= static_cast<double>(k) * alpha / static_cast<double>(m)) {
            cutoff = k;
            break;
        }
    }
    for (std::size_t k = 0; k < cutoff; ++k) out.reject[order[k]] = true;

    // Adjusted p: running minimum from the largest rank down.
    double running = 1.0;
    std::vector<double> adj_sorted(m);
    for (std::size_t k = m; k >= 1; --k) {
        const double candidate = pvals[order[k - 1]] * static_cast<double>(m) / static_cast<double>(k);
        running = std::min(running, std::min(1.0, candidate));
        adj_sorted[k - 1] = running;
    }
    for (std::size_t k = 0; k < m; ++k) out.adjusted[order[k]] = adj_sorted[k];
    return out;
}

std::vector<double> bonferroni(const std::vector<double>& pvals) {
    for (double p : pvals) require(p >= 0.0 && p <= 1.0, "bonferroni: p outside [0,1]");
    std::vector<double> out;
    out.reserve(pvals.size());
    const double m = static_cast<double>(pvals.size());
    for (double p : pvals) out.push_back(std::min(1.0, p * m));
    return out;
}

// ============================================================================
// CORRELATION MATRICES
// ============================================================================

Matrix correlation_matrix(const std::vector<Sample>& columns) {
    require(columns.size() >= 2, "correlation_matrix: >= 2 columns required");
    const std::size_t m = columns.size();
    const std::size_t n = columns[0].n();
    require(n >= 2, "correlation_matrix: >= 2 rows required");
    for (const auto& c : columns) {
        require(c.n() == n, "correlation_matrix: unequal column lengths");
        require_finite(c.values, "correlation_matrix");
    }

    std::vector<double> means(m), norms(m);
    std::vector<std::vector<double>> centered(m);
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = mean_of(columns[j].values);
        centered[j].resize(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            centered[j][i] = columns[j].values[i] - means[j];
            ss += centered[j][i] * centered[j][i];
        }
        if (ss <= 0.0) {
            throw std::invalid_argument("correlation_matrix: zero-variance column at index " +
                                        std::to_string(j));
        }
        norms[j] = std::sqrt(ss);
    }

    Matrix r(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        r.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += centered[i][k] * centered[j][k];
            const double rho = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
            r.at(i, j) = rho;
            r.at(j, i) = rho;
        }
    }
    return r;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    require(a.rows == b.rows && a.cols == b.cols, "frobenius_distance: dimension mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

}  // namespace simaudit::stats

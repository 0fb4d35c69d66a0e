#pragma once

// Independent test oracles: brute-force enumerations and quadrature that
// deliberately avoid the library's own computation paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

// Cliff's delta by full pair enumeration.
inline double cliffs_delta_brute(const std::vector<double>& x, const std::vector<double>& y) {
    long long net = 0;
    for (double xv : x) {
        for (double yv : y) {
            if (xv > yv) ++net;
            if (xv < yv) --net;
        }
    }
    return static_cast<double>(net) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

// Benjamini-Hochberg rejection set straight from the definition: sort the
// p-values, scan every k for p_(k) <= k*alpha/m, reject ranks 1..k_max.
inline std::vector<bool> bh_reject_brute(const std::vector<double>& pvals, double alpha) {
    const std::size_t m = pvals.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (pvals[order[j]] < pvals[order[i]]) std::swap(order[i], order[j]);
        }
    }
    std::size_t k_max = 0;
    for (std::size_t k = 1; k <= m; ++k) {
        if (pvals[order[k - 1]] <= static_cast<double>(k) * alpha / static_cast<double>(m)) {
            k_max = k;
        }
    }
    std::vector<bool> reject(m, false);
    for (std::size_t k = 0; k < k_max; ++k) reject[order[k]] = true;
    return reject;
}

// Adaptive Simpson quadrature. The per-interval tolerance is deliberately not
// halved on recursion: below ~1e-15 the Richardson estimate is dominated by
// roundoff and the recursion would bottom out at full depth everywhere.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double sum = left + right;
    if (depth <= 0 || std::abs(sum - whole) < 15.0 * tol || std::abs(sum) < 1e-18) {
        return sum + (sum - whole) / 15.0;
    }
    return simpson_step(f, a, m, fa, fm, flm, left, tol, depth - 1) +
           simpson_step(f, m, b, fm, fb, frm, right, tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fb, fm, whole, tol, 30);
}

inline double log_gamma_ref(double x) { return std::lgamma(x); }

// F(df1, df2) density, integrated numerically for an independent tail check.
inline double f_density(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    const double half1 = d1 / 2.0, half2 = d2 / 2.0;
    const double log_beta = log_gamma_ref(half1) + log_gamma_ref(half2) - log_gamma_ref(half1 + half2);
    const double log_pdf = half1 * std::log(d1 / d2) + (half1 - 1.0) * std::log(x) -
                           (half1 + half2) * std::log(1.0 + d1 * x / d2) - log_beta;
    return std::exp(log_pdf);
}

inline double f_upper_tail_quadrature(double x, double d1, double d2) {
    // Integrate the density from 0 to x with the substitution t = u^2, which
    // removes the t^(d1/2 - 1) endpoint singularity; the tail is the complement.
    return 1.0 - integrate([&](double u) { return 2.0 * u * f_density(u * u, d1, d2); }, 0.0,
                           std::sqrt(x), 1e-13);
}

inline double t_density(double x, double df) {
    const double log_pdf = log_gamma_ref((df + 1.0) / 2.0) - log_gamma_ref(df / 2.0) -
                           0.5 * std::log(df * M_PI) -
                           (df + 1.0) / 2.0 * std::log(1.0 + x * x / df);
    return std::exp(log_pdf);
}

inline double t_two_sided_quadrature(double t, double df) {
    const double at = std::abs(t);
    return 1.0 - integrate([&](double x) { return t_density(x, df); }, -at, at, 1e-13);
}

inline double chi2_density(double x, double df) {
    if (x <= 0.0) return 0.0;
    const double half = df / 2.0;
    return std::exp((half - 1.0) * std::log(x) - x / 2.0 - half * std::log(2.0) -
                    log_gamma_ref(half));
}

inline double chi2_upper_tail_quadrature(double x, double df) {
    // Integrate the tail directly in u = sqrt(t). The upper limit covers
    // 40 SDs beyond the mean, past which the remaining mass is below 1e-18;
    // direct tail integration also keeps large-df cases fast and avoids the
    // 1 - P cancellation.
    const double upper = std::sqrt(df + 40.0 * std::sqrt(2.0 * df) + 100.0);
    if (std::sqrt(x) >= upper) return 0.0;
    return integrate([&](double u) { return 2.0 * u * chi2_density(u * u, df); }, std::sqrt(x),
                     upper, 1e-13);
}

}  // namespace oracles

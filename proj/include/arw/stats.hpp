#ifndef ARW_STATS_HPP
#define ARW_STATS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace arw {

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series / continued
// fraction (Lentz), standard numerics.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace detail

/// Upper-tail p-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double statistic, int df) {
    if (df <= 0) throw std::invalid_argument("chi_square_pvalue: df must be positive");
    if (statistic <= 0.0) return 1.0;
    return 1.0 - detail::gamma_p(df / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic;
    int df;
    double pvalue;
};

/// Pearson chi-square of observed counts against expected probabilities.
/// Bins with expected count below `min_expected` are pooled into the
/// last kept bin.
inline ChiSquareResult chi_square_test(const std::vector<long long>& observed,
                                       const std::vector<double>& expected_prob,
                                       long long total, double min_expected = 5.0) {
    if (observed.size() != expected_prob.size() || observed.empty())
        throw std::invalid_argument("chi_square_test: size mismatch");
    std::vector<double> exp_counts;
    std::vector<double> obs_counts;
    double pool_exp = 0.0, pool_obs = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_prob[i] * static_cast<double>(total);
        pool_exp += e;
        pool_obs += static_cast<double>(observed[i]);
        if (pool_exp >= min_expected) {
            exp_counts.push_back(pool_exp);
            obs_counts.push_back(pool_obs);
            pool_exp = pool_obs = 0.0;
        }
    }
    if (pool_exp > 0.0 && !exp_counts.empty()) {
        exp_counts.back() += pool_exp;
        obs_counts.back() += pool_obs;
    }
    if (exp_counts.size() < 2) throw std::invalid_argument("chi_square_test: too few bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_counts.size(); ++i) {
        double d = obs_counts[i] - exp_counts[i];
        stat += d * d / exp_counts[i];
    }
    int df = static_cast<int>(exp_counts.size()) - 1;
    return {stat, df, chi_square_pvalue(stat, df)};
}

struct Interval {
    double lo;
    double hi;
    double half_width() const { return (hi - lo) / 2.0; }
};

/// Wilson score interval for a binomial proportion (z = 1.96 default).
inline Interval wilson_interval(long long successes, long long n, double z = 1.96) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
    double p = static_cast<double>(successes) / static_cast<double>(n);
    double z2 = z * z;
    double denom = 1.0 + z2 / static_cast<double>(n);
    double center = (p + z2 / (2.0 * static_cast<double>(n))) / denom;
    double half = z *
                  std::sqrt(p * (1.0 - p) / static_cast<double>(n) +
                            z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n))) /
                  denom;
    return {center - half, center + half};
}

}  // namespace arw

#endif

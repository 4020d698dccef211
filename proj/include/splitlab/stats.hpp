#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "splitlab/errors.hpp"
#include "splitlab/summation.hpp"

namespace splitlab {

struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double stderr_mean = 0.0;
    double stderr_variance = 0.0; // jackknife standard error of the variance
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
    SampleStats out;
    out.count = xs.size();
    if (xs.empty()) return out;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    out.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    CompensatedSum sq, quart;
    for (double x : xs) {
        const double d = x - out.mean;
        sq.add(d * d);
        quart.add(d * d * d * d);
    }
    const double n = static_cast<double>(xs.size());
    out.variance = sq.value() / (n - 1.0);
    out.stderr_mean = std::sqrt(out.variance / n);
    // Var(s^2) ~ (m4 - (n-3)/(n-1) s^4) / n.
    const double m4 = quart.value() / n;
    const double var_s2 = std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * out.variance * out.variance) / n);
    out.stderr_variance = std::sqrt(var_s2);
    return out;
}

// Jackknife standard error of the mean of `xs` (exactly the classic stderr).
inline double jackknife_stderr_mean(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double total = compensated_total(xs);
    const double full = total / static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) {
        const double loo = (total - x) / static_cast<double>(n - 1);
        ss += (loo - full) * (loo - full);
    }
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

inline double normal_cdf(double x, double sigma) {
    // 0.5 * erfc(-x / (sigma sqrt(2))); relative error well under 1e-12 on
    // [-8 sigma, 8 sigma] with the libm erfc.
    return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

// Kolmogorov-Smirnov distance of a sample to Normal(0, sigma_sq).
inline double ks_distance_to_normal(std::vector<double> sample, double sigma_sq) {
    if (sample.empty()) throw ConfigError("KS distance needs a sample");
    if (!(sigma_sq > 0.0)) throw DegenerateSigmaError("KS against a degenerate normal");
    std::sort(sample.begin(), sample.end());
    const double sigma = std::sqrt(sigma_sq);
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i], sigma);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

// Anderson-Darling statistic against Normal(0, sigma_sq).
inline double anderson_darling_to_normal(std::vector<double> sample, double sigma_sq) {
    if (sample.empty() || !(sigma_sq > 0.0)) return 0.0;
    std::sort(sample.begin(), sample.end());
    const double sigma = std::sqrt(sigma_sq);
    const std::size_t n = sample.size();
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = std::max(1e-300, normal_cdf(sample[i], sigma));
        const double z2 = std::max(1e-300, 1.0 - normal_cdf(sample[n - 1 - i], sigma));
        acc.add((2.0 * static_cast<double>(i) + 1.0) * (std::log(z1) + std::log(z2)));
    }
    return -static_cast<double>(n) - acc.value() / static_cast<double>(n);
}

inline double chi_square_pvalue(double statistic, double dof) {
    if (dof <= 0.0) throw ConfigError("chi-square needs positive degrees of freedom");
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LinearFit least_squares_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("fit needs matched samples");
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

inline double sample_covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("covariance needs matched samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    CompensatedSum acc;
    for (std::size_t i = 0; i < xs.size(); ++i) acc.add((xs[i] - mx) * (ys[i] - my));
    return acc.value() / (n - 1.0);
}

struct EstimateWithError {
    double value = 0.0;
    double stderr_value = 0.0;
};

// Delete-1 jackknife for the covariance of two paired samples.
inline EstimateWithError jackknife_covariance(const std::vector<double>& xs,
                                              const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 3 || ys.size() != n) throw ConfigError("jackknife needs at least 3 paired points");
    const double dn = static_cast<double>(n);
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxy += xs[i] * ys[i];
    }
    EstimateWithError out;
    out.value = (sxy - sx * sy / dn) / (dn - 1.0);
    double mean_loo = 0.0;
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = dn - 1.0;
        const double sxi = sx - xs[i];
        const double syi = sy - ys[i];
        const double sxyi = sxy - xs[i] * ys[i];
        loo[i] = (sxyi - sxi * syi / m) / (m - 1.0);
        mean_loo += loo[i];
    }
    mean_loo /= dn;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    out.stderr_value = std::sqrt(ss * (dn - 1.0) / dn);
    return out;
}

// Delete-1 jackknife for Pearson correlation.
inline EstimateWithError jackknife_correlation(const std::vector<double>& xs,
                                               const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 3 || ys.size() != n) throw ConfigError("jackknife needs at least 3 paired points");
    const double dn = static_cast<double>(n);
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    auto corr_from = [](double m, double ax, double ay, double axx, double ayy, double axy) {
        const double cov = axy - ax * ay / m;
        const double vx = axx - ax * ax / m;
        const double vy = ayy - ay * ay / m;
        const double denom = std::sqrt(std::max(vx, 0.0) * std::max(vy, 0.0));
        return denom > 0.0 ? cov / denom : 0.0;
    };
    EstimateWithError out;
    out.value = corr_from(dn, sx, sy, sxx, syy, sxy);
    std::vector<double> loo(n);
    double mean_loo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        loo[i] = corr_from(dn - 1.0, sx - xs[i], sy - ys[i], sxx - xs[i] * xs[i],
                           syy - ys[i] * ys[i], sxy - xs[i] * ys[i]);
        mean_loo += loo[i];
    }
    mean_loo /= dn;
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    out.stderr_value = std::sqrt(ss * (dn - 1.0) / dn);
    return out;
}

} // namespace splitlab

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "splitlab/exact_law.hpp"
#include "splitlab/process_model.hpp"
#include "splitlab/sequences.hpp"

namespace splitlab {

// Closed-form variance bundle. Series entries are truncated once the
// geometric tail bound drops below kSeriesTail; the bound is reported so the
// "exact" numbers are certifiably accurate.
inline constexpr double kSeriesTail = 1e-14;

struct VarianceReport {
    std::vector<double> means;          // a_j in ensemble order
    std::vector<double> second_moments; // E X_j^2(0)
    double sigma1_sq = std::numeric_limits<double>::quiet_NaN();
    double sigma_sq = std::numeric_limits<double>::quiet_NaN();
    double sigma01_sq = std::numeric_limits<double>::quiet_NaN();
    double sigma_hat_sq = std::numeric_limits<double>::quiet_NaN();
    double xi = std::numeric_limits<double>::quiet_NaN();
    double series_tail_bound = 0.0;
    std::string method = "exact";
    bool degenerate = false;
    std::string degeneracy_reason;
};

namespace detail {

struct SeriesResult {
    double sum = 0.0;
    double tail_bound = 0.0;
    bool truncated = false;
};

// sum_{n>=1} term(lag = step*n) for exactly mixing chains, stopped when the
// geometric envelope (2D)^2 C rho^{lag} certifies the remainder.
template <typename TermFn>
SeriesResult geometric_series(const MixingBound& mixing, double two_d_sq, std::int64_t step,
                              std::size_t min_window, TermFn&& term) {
    SeriesResult out;
    const double c = mixing.constant * two_d_sq;
    for (std::int64_t n = 1;; ++n) {
        const std::int64_t lag = step * n;
        if (mixing.rate == 0.0) {
            if (static_cast<std::size_t>(lag) >= min_window) break; // exact zeros from here on
            out.sum += term(lag);
            continue;
        }
        out.sum += term(lag);
        out.truncated = true;
        // Remaining terms n' > n are each bounded by c rho^{step n'}.
        const double r = std::pow(mixing.rate, static_cast<double>(step));
        const double tail = c * std::pow(mixing.rate, static_cast<double>(step * (n + 1))) /
                            (1.0 - r);
        if (tail < kSeriesTail) {
            out.tail_bound = tail;
            break;
        }
        if (n > 1000000) throw TooLargeError("variance series converges too slowly");
    }
    return out;
}

inline bool observable_is_zero_as(const ExactLaw& law, const Observable& obs) {
    const std::vector<double> mu = law.window_law(obs.window());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] > 0.0 && std::abs(obs.value_packed(i)) > 1e-14 * std::max(1.0, obs.bound())) {
            return false;
        }
    }
    return true;
}

} // namespace detail

// sigma_1^2 = E X_1^2(0) - a_1^2 + 2 sum_{n>=1} Cov(X_1(rn), X_1(0)). The
// offset p never enters by stationarity.
inline VarianceReport sigma1_sq(const ProcessEnsemble& ensemble, std::int64_t r) {
    if (r < 1) throw ConfigError("sigma1_sq needs r >= 1");
    ExactLaw law(ensemble.model);
    const Observable& x1 = ensemble.by_j(1);
    const MixingBound mixing = mixing_bounds(ensemble.model);

    VarianceReport report;
    const double a1 = law.mean(x1);
    const double m2 = law.second_moment(x1);
    if (m2 < a1 * a1 - 1e-12) {
        throw SplitlabError("Cauchy-Schwarz violated in exact moments");
    }
    const double two_d_sq = 4.0 * ensemble.bound * ensemble.bound;
    const detail::SeriesResult series = detail::geometric_series(
        mixing, two_d_sq, r, x1.window(), [&](std::int64_t lag) {
            return law.autocovariance(x1, static_cast<std::uint64_t>(lag));
        });
    report.means = {a1};
    report.second_moments = {m2};
    report.sigma1_sq = m2 - a1 * a1 + 2.0 * series.sum;
    report.series_tail_bound = 2.0 * series.tail_bound;
    report.method = series.truncated ? "truncated-series" : "exact";
    return report;
}

// sigma^2 of the SPLIT limit. With a constant first slot the expression
// reduces to prod E X_j^2 - prod a_j^2 automatically.
inline VarianceReport sigma_sq(const ProcessEnsemble& ensemble, std::int64_t r) {
    ExactLaw law(ensemble.model);
    const int ell = ensemble.max_j();
    VarianceReport report = sigma1_sq(ensemble, r);
    const double m2_1 = report.second_moments[0];
    const double s1 = report.sigma1_sq;

    double prod_m2_tail = 1.0;
    double prod_a_sq_tail = 1.0;
    for (int j = 2; j <= ell; ++j) {
        const Observable& obs = ensemble.by_j(j);
        const double a = law.mean(obs);
        const double m2 = law.second_moment(obs);
        if (m2 < a * a - 1e-12) throw SplitlabError("Cauchy-Schwarz violated in exact moments");
        report.means.push_back(a);
        report.second_moments.push_back(m2);
        prod_m2_tail *= m2;
        prod_a_sq_tail *= a * a;
    }
    report.sigma_sq =
        (ell == 1) ? s1 : m2_1 * (prod_m2_tail - prod_a_sq_tail) + s1 * prod_a_sq_tail;

    // Degeneracy classification: sigma = 0 iff some X_j(0) = 0 a.s. (j >= 1)
    // or X_j(0) = a_j a.s. for all j >= 2 and sigma_1 = 0.
    bool some_zero = false;
    for (int j = 1; j <= ell; ++j) {
        if (detail::observable_is_zero_as(law, ensemble.by_j(j))) {
            some_zero = true;
            report.degeneracy_reason = "X_" + std::to_string(j) + "(0) = 0 a.s.";
            break;
        }
    }
    bool tail_constant = true;
    for (int j = 2; j <= ell; ++j) {
        const std::size_t idx = static_cast<std::size_t>(j - 1);
        const double var_j =
            report.second_moments[idx] - report.means[idx] * report.means[idx];
        if (var_j > 1e-14 * std::max(1.0, ensemble.bound * ensemble.bound)) {
            tail_constant = false;
            break;
        }
    }
    if (!some_zero && tail_constant && std::abs(s1) <= 1e-12) {
        report.degeneracy_reason = "X_j(0) = a_j a.s. for all j >= 2 and sigma_1 = 0";
    }
    report.degenerate = some_zero || (tail_constant && std::abs(s1) <= 1e-12);
    return report;
}

// Two-linear-term variance, (2.9++)/(2.9+++) exactly as printed, including
// the asymmetric index ranges inside Xi. The Monte Carlo oracle stays the
// ground truth; callers compare and surface divergences rather than
// reconciling them here.
inline VarianceReport sigma_hat_sq(const ProcessEnsemble& ensemble, const SequenceFamily& family) {
    if (family.mode != FamilyMode::TwoLinear || !ensemble.has_x0()) {
        throw NotTwoLinearError("sigma_hat_sq needs TWO_LINEAR mode with an X_0 observable");
    }
    const std::int64_t r = family.linear_q1().slope;
    if (r < 2) throw NotTwoLinearError("TWO_LINEAR requires r >= 2");

    ExactLaw law(ensemble.model);
    const Observable& x0 = ensemble.by_j(0);
    const Observable& x1 = ensemble.by_j(1);
    const MixingBound mixing = mixing_bounds(ensemble.model);
    const double two_d_sq = 4.0 * ensemble.bound * ensemble.bound;

    VarianceReport report;
    const double a0 = law.mean(x0);
    const double a1 = law.mean(x1);
    const double m2_0 = law.second_moment(x0);
    const double m2_1 = law.second_moment(x1);
    report.means = {a0, a1};
    report.second_moments = {m2_0, m2_1};

    const std::size_t w_max = ensemble.max_window();
    const detail::SeriesResult auto0 = detail::geometric_series(
        mixing, two_d_sq, 1, x0.window(),
        [&](std::int64_t lag) { return law.autocovariance(x0, static_cast<std::uint64_t>(lag)); });
    const detail::SeriesResult auto1 = detail::geometric_series(
        mixing, two_d_sq, r, x1.window(),
        [&](std::int64_t lag) { return law.autocovariance(x1, static_cast<std::uint64_t>(lag)); });
    // Xi's first series starts at n = 0; pull the n = 0 cross term out and
    // run the geometric machinery from n = 1 on.
    const double cross_at_zero = law.cross_covariance(x0, x1, 0);
    const detail::SeriesResult cross01 = detail::geometric_series(
        mixing, two_d_sq, 1, w_max, [&](std::int64_t lag) {
            return law.cross_covariance(x1, x0, static_cast<std::uint64_t>(lag));
        });
    const detail::SeriesResult cross10 = detail::geometric_series(
        mixing, two_d_sq, 1, w_max, [&](std::int64_t lag) {
            return law.cross_covariance(x0, x1, static_cast<std::uint64_t>(lag));
        });

    report.xi = 2.0 * a0 * a1 * ((cross_at_zero + cross01.sum) + cross10.sum);
    report.sigma01_sq = (m2_0 - a0 * a0) * m2_1 + a0 * a0 * (m2_1 - a1 * a1) +
                        2.0 * auto0.sum + 2.0 * a0 * a0 * auto1.sum + report.xi;
    report.sigma1_sq = m2_1 - a1 * a1 + 2.0 * auto1.sum;

    double prod_m2_tail = 1.0;
    double prod_a_sq_tail = 1.0;
    for (int j = 2; j <= ensemble.max_j(); ++j) {
        const Observable& obs = ensemble.by_j(j);
        const double a = law.mean(obs);
        const double m2 = law.second_moment(obs);
        report.means.push_back(a);
        report.second_moments.push_back(m2);
        prod_m2_tail *= m2;
        prod_a_sq_tail *= a * a;
    }
    report.sigma_hat_sq = m2_0 * m2_1 * (prod_m2_tail - prod_a_sq_tail) +
                          report.sigma01_sq * prod_a_sq_tail;
    report.series_tail_bound = 2.0 * (auto0.tail_bound + auto1.tail_bound + cross01.tail_bound +
                                      cross10.tail_bound);
    report.method = (auto0.truncated || auto1.truncated || cross01.truncated || cross10.truncated)
                        ? "truncated-series"
                        : "exact";
    report.degenerate = std::abs(report.sigma_hat_sq) <= 1e-12;
    return report;
}

} // namespace splitlab

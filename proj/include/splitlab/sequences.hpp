#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "splitlab/checked.hpp"
#include "splitlab/errors.hpp"

namespace splitlab {

struct LinearSeq {
    std::int64_t slope = 1;  // r > 0
    std::int64_t offset = 0; // p >= 0
};

struct PolynomialSeq {
    std::vector<std::int64_t> coeffs; // c0 + c1 n + c2 n^2 + ...
};

struct TableSeq {
    std::vector<std::int64_t> values;
};

using SequenceSpec = std::variant<LinearSeq, PolynomialSeq, TableSeq>;

enum class FamilyMode { Split, TwoLinear, Splad, Explore };

inline std::string family_mode_name(FamilyMode mode) {
    switch (mode) {
        case FamilyMode::Split: return "SPLIT";
        case FamilyMode::TwoLinear: return "TWO_LINEAR";
        case FamilyMode::Splad: return "SPLAD";
        case FamilyMode::Explore: return "EXPLORE";
    }
    return "?";
}

namespace detail {

using Wide = __int128;

inline Wide evaluate_wide(const SequenceSpec& spec, std::int64_t n) {
    if (const auto* lin = std::get_if<LinearSeq>(&spec)) {
        return static_cast<Wide>(lin->slope) * n + lin->offset;
    }
    if (const auto* poly = std::get_if<PolynomialSeq>(&spec)) {
        Wide acc = 0;
        constexpr Wide cap = static_cast<Wide>(1) << 100;
        for (std::size_t i = poly->coeffs.size(); i-- > 0;) {
            acc = acc * n + poly->coeffs[i];
            if (acc > cap || acc < -cap) {
                throw TooLargeError("polynomial value exceeds the scan range");
            }
        }
        return acc;
    }
    const auto& table = std::get<TableSeq>(spec);
    if (n < 0 || static_cast<std::size_t>(n) >= table.values.size()) {
        throw IndexOverflowError("table sequence has no entry for n = " + std::to_string(n));
    }
    return table.values[static_cast<std::size_t>(n)];
}

// Directed bounds for n^e: never certify a violated inequality, so powers
// feeding the "large" side round up and those feeding the "small" side round
// down (1 ulp scale margin around std::pow).
inline double pow_upper(double n, double e) {
    const double r = std::pow(n, e);
    return r * (1.0 + 4e-16) + 1e-300;
}

inline double pow_lower(double n, double e) {
    const double r = std::pow(n, e);
    return r * (1.0 - 4e-16);
}

inline std::int64_t floor_pow_lower(double n, double e) {
    const double r = pow_lower(n, e);
    return static_cast<std::int64_t>(std::floor(r));
}

} // namespace detail

// Index sequences q_j with validation state. In SPLIT mode indices run
// j = 1..l with q_1 linear; TWO_LINEAR prepends q_0(n) = n and requires the
// q_1 slope r >= 2; SPLAD families are strictly increasing.
struct SequenceFamily {
    FamilyMode mode = FamilyMode::Split;
    std::vector<SequenceSpec> q; // ordered by j starting at first_j()
    double gamma = 0.25;
    std::int64_t n0 = 1;

    int first_j() const { return mode == FamilyMode::TwoLinear ? 0 : 1; }
    int max_j() const { return first_j() + static_cast<int>(q.size()) - 1; }
    int ell() const { return max_j(); }

    const SequenceSpec& spec(int j) const {
        return q[static_cast<std::size_t>(j - first_j())];
    }

    bool first_is_linear() const {
        return std::holds_alternative<LinearSeq>(spec(1));
    }

    const LinearSeq& linear_q1() const {
        const auto* lin = std::get_if<LinearSeq>(&spec(1));
        if (lin == nullptr) throw ConfigError("q_1 is not linear");
        return *lin;
    }
};

inline std::int64_t evaluate(const SequenceFamily& family, int j, std::int64_t n) {
    if (n < 0) throw IndexOverflowError("sequence argument must be non-negative");
    const SequenceSpec& spec = family.spec(j);
    std::int64_t value = 0;
    if (const auto* lin = std::get_if<LinearSeq>(&spec)) {
        value = checked_add(checked_mul(lin->slope, n), lin->offset);
    } else if (const auto* poly = std::get_if<PolynomialSeq>(&spec)) {
        std::int64_t acc = 0;
        for (std::size_t i = poly->coeffs.size(); i-- > 0;) {
            acc = checked_add(checked_mul(acc, n), poly->coeffs[i]);
        }
        value = acc;
    } else {
        const auto& table = std::get<TableSeq>(spec);
        if (static_cast<std::size_t>(n) >= table.values.size()) {
            throw IndexOverflowError("table sequence has no entry for n = " + std::to_string(n));
        }
        value = table.values[static_cast<std::size_t>(n)];
    }
    if (value < 0) {
        throw IndexOverflowError("sequence q_" + std::to_string(j) + " is negative at n = " +
                                 std::to_string(n));
    }
    return value;
}

struct GrowthViolation {
    std::int64_t n = 0;
    int j = 0;
    std::string condition;
};

struct GrowthReport {
    bool valid = false;
    std::int64_t n0 = 1;
    std::vector<GrowthViolation> violations; // capped sample
    std::uint64_t violation_count = 0;
    std::int64_t n_max = 0;
};

namespace detail {

inline void record(GrowthReport& report, std::int64_t n, int j, const char* condition,
                   std::int64_t& last_violation) {
    ++report.violation_count;
    last_violation = std::max(last_violation, n);
    if (report.violations.size() < 64) {
        report.violations.push_back({n, j, condition});
    }
}

} // namespace detail

// Finite scan certificate over n <= n_max. The scan itself runs in 128-bit
// arithmetic so a sequence that overflows 64-bit indices near n_max (where it
// would never be evaluated as a sample index) can still be certified.
inline GrowthReport validate_growth(const SequenceFamily& family, double gamma,
                                    std::int64_t n_max) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
    if (n_max < 10) throw ConfigError("n_max must be at least 10");
    GrowthReport report;
    report.n_max = n_max;
    std::int64_t last_violation = 0;

    const int fj = family.first_j();
    const int ell = family.max_j();

    if (family.mode == FamilyMode::Split || family.mode == FamilyMode::TwoLinear) {
        if (!family.first_is_linear()) {
            detail::record(report, 0, 1, "q_1 must be linear (2.2)", last_violation);
            last_violation = n_max;
        } else {
            const LinearSeq& lin = family.linear_q1();
            if (lin.slope < 1 || lin.offset < 0) {
                detail::record(report, 0, 1, "q_1 needs r >= 1, p >= 0 (2.2)", last_violation);
                last_violation = n_max;
            }
            if (family.mode == FamilyMode::TwoLinear && lin.slope < 2) {
                detail::record(report, 0, 1, "TWO_LINEAR requires r >= 2", last_violation);
                last_violation = n_max;
            }
        }
        if (family.mode == FamilyMode::TwoLinear) {
            const auto* q0 = std::get_if<LinearSeq>(&family.spec(0));
            if (q0 == nullptr || q0->slope != 1 || q0->offset != 0) {
                detail::record(report, 0, 0, "q_0(n) = n required", last_violation);
                last_violation = n_max;
            }
        }

        for (std::int64_t n = 1; n <= n_max; ++n) {
            try {
                const double ng_up = detail::pow_upper(static_cast<double>(n), gamma);
                // (2.3): q_j(n+1) >= q_j(n) + n^gamma for j >= 2.
                if (n + 1 <= n_max) {
                    for (int j = 2; j <= ell; ++j) {
                        const detail::Wide lhs = detail::evaluate_wide(family.spec(j), n + 1) -
                                                 detail::evaluate_wide(family.spec(j), n);
                        // Increments beyond 2^62 dominate any n^gamma in range.
                        bool violated = false;
                        if (lhs < (detail::Wide(1) << 62)) {
                            violated =
                                static_cast<double>(static_cast<std::int64_t>(lhs)) < ng_up;
                        }
                        if (violated) detail::record(report, n, j, "(2.3)", last_violation);
                    }
                }
                // (2.4): q_{j+1}([n^{1-gamma}]) >= q_j(n) * n^gamma.
                const std::int64_t m_low =
                    std::max<std::int64_t>(0, detail::floor_pow_lower(static_cast<double>(n),
                                                                      1.0 - gamma));
                for (int j = 1; j <= ell - 1; ++j) {
                    const detail::Wide lhs = detail::evaluate_wide(family.spec(j + 1), m_low);
                    const detail::Wide qn = detail::evaluate_wide(family.spec(j), n);
                    const long double rhs =
                        static_cast<long double>(qn) * static_cast<long double>(ng_up);
                    if (static_cast<long double>(lhs) < rhs) {
                        detail::record(report, n, j, "(2.4)", last_violation);
                    }
                }
            } catch (const SplitlabError&) {
                detail::record(report, n, 0, "evaluation failed in scan", last_violation);
            }
        }
    } else if (family.mode == FamilyMode::Splad) {
        for (std::int64_t n = 0; n < n_max; ++n) {
            try {
                for (int j = fj; j <= ell; ++j) {
                    if (detail::evaluate_wide(family.spec(j), n + 1) <=
                        detail::evaluate_wide(family.spec(j), n)) {
                        detail::record(report, n, j, "strict increase", last_violation);
                    }
                }
            } catch (const SplitlabError&) {
                detail::record(report, n, 0, "evaluation failed in scan", last_violation);
            }
        }
        // (5.6): q_{j+1}([n^gamma]) > q_j(n).
        for (std::int64_t n = 1; n <= n_max; ++n) {
            try {
                const std::int64_t m_low =
                    std::max<std::int64_t>(0,
                                           detail::floor_pow_lower(static_cast<double>(n), gamma));
                for (int j = 1; j <= ell - 1; ++j) {
                    if (detail::evaluate_wide(family.spec(j + 1), m_low) <=
                        detail::evaluate_wide(family.spec(j), n)) {
                        detail::record(report, n, j, "(5.6)", last_violation);
                    }
                }
            } catch (const SplitlabError&) {
                detail::record(report, n, 0, "evaluation failed in scan", last_violation);
            }
        }
    } else {
        // Explore mode carries no growth guarantees by construction.
        report.valid = true;
        report.n0 = 1;
        return report;
    }

    report.n0 = last_violation + 1;
    // A certificate that only covers a vanishing tail of the scan is no
    // certificate: require a violation-free top decade.
    report.valid = report.n0 <= std::max<std::int64_t>(10, (n_max * 9) / 10);
    return report;
}

// Separation consequence of (2.3)-(2.4): q_{j+1}(n) - q_j(n) >= n - [n^{1-g}].
struct SeparationReport {
    bool holds = true;
    std::int64_t first_failure = -1;
};

inline SeparationReport check_separation(const SequenceFamily& family, double gamma,
                                         std::int64_t n_from, std::int64_t n_to) {
    SeparationReport out;
    for (std::int64_t n = n_from; n <= n_to; ++n) {
        const std::int64_t m_low =
            std::max<std::int64_t>(0, detail::floor_pow_lower(static_cast<double>(n), 1.0 - gamma));
        const detail::Wide rhs = n - m_low;
        for (int j = 1; j <= family.max_j() - 1; ++j) {
            const detail::Wide lhs = detail::evaluate_wide(family.spec(j + 1), n) -
                                     detail::evaluate_wide(family.spec(j), n);
            if (lhs < rhs) {
                out.holds = false;
                out.first_failure = n;
                return out;
            }
        }
    }
    return out;
}

} // namespace splitlab

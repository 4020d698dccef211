#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "splitlab/errors.hpp"
#include "splitlab/markov.hpp"
#include "splitlab/process_model.hpp"

namespace splitlab {

// A factor in a product expectation: observable evaluated at an absolute
// time. Positions need not be distinct; coincident factors multiply.
struct Factor {
    std::uint64_t position = 0;
    const Observable* observable = nullptr;
};

// Exact distribution computations on the (possibly i.i.d.) chain view.
// Window functions are handled by lifting the chain to w-tuples; gaps are
// bridged through binary squarings of the one-step kernel, so positions may
// be astronomically far apart.
class ExactLaw {
  public:
    explicit ExactLaw(const ProcessModel& model)
        : view_(chain_view(model)), ladder_(view_.transition) {}

    const ChainView& view() const { return view_; }

    // Stationary law of a length-w window, earliest state first.
    std::vector<double> window_law(std::size_t w) const {
        const std::size_t s = view_.states;
        std::size_t count = 1;
        for (std::size_t i = 0; i < w; ++i) {
            count *= s;
            if (count > kMaxTupleStates) throw TooLargeError("window law too large to enumerate");
        }
        std::vector<double> law(count, 0.0);
        for (std::size_t packed = 0; packed < count; ++packed) {
            double p = 1.0;
            std::size_t rest = packed;
            std::size_t prev = 0;
            for (std::size_t i = 0; i < w; ++i) {
                const std::size_t digit_pos = w - 1 - i;
                std::size_t divisor = 1;
                for (std::size_t d = 0; d < digit_pos; ++d) divisor *= s;
                const std::size_t state = rest / divisor;
                rest %= divisor;
                if (i == 0) {
                    p *= view_.stationary[state];
                } else {
                    p *= view_.transition(prev, state);
                }
                prev = state;
            }
            law[packed] = p;
        }
        return law;
    }

    // Exact joint law over an arbitrary sorted position set (single states).
    // Returns probabilities indexed by base-S digits, earliest position most
    // significant.
    std::vector<double> joint_law(const std::vector<std::uint64_t>& positions) const {
        const std::size_t s = view_.states;
        std::size_t count = 1;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            count *= s;
            if (count > kMaxTupleStates) throw TooLargeError("joint law too large to enumerate");
        }
        std::vector<SquareMatrix> bridges;
        for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
            if (positions[i + 1] <= positions[i]) {
                throw UnsortedIndicesError("joint_law needs strictly increasing positions");
            }
            bridges.push_back(ladder_.matrix_for_gap(positions[i + 1] - positions[i]));
        }
        std::vector<double> law(count, 0.0);
        std::vector<std::size_t> digits(positions.size(), 0);
        for (std::size_t packed = 0; packed < count; ++packed) {
            std::size_t rest = packed;
            for (std::size_t i = positions.size(); i-- > 0;) {
                digits[i] = rest % s;
                rest /= s;
            }
            double p = view_.stationary[digits[0]];
            for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
                p *= bridges[i](digits[i], digits[i + 1]);
            }
            law[packed] = p;
        }
        return law;
    }

    // E prod_i f_i(W_{p_i}) computed by transferring a measure over w-tuples
    // along the sorted factor positions.
    double product_expectation(std::vector<Factor> factors) const {
        if (factors.empty()) return 1.0;
        std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) {
            return a.position < b.position;
        });
        std::size_t w = 1;
        for (const Factor& f : factors) w = std::max(w, f.observable->window());
        const std::size_t s = view_.states;
        std::size_t tuple_count = 1;
        for (std::size_t i = 0; i < w; ++i) {
            tuple_count *= s;
            if (tuple_count > kMaxTupleStates) {
                throw TooLargeError("window lift exceeds the exact-enumeration cap");
            }
        }

        std::vector<double> v = window_law(w);
        std::uint64_t t = factors.front().position;
        std::size_t fi = 0;
        std::vector<double> next(tuple_count, 0.0);
        while (fi < factors.size()) {
            // Apply every factor anchored at the current time.
            while (fi < factors.size() && factors[fi].position == t) {
                apply_factor(v, *factors[fi].observable, w);
                ++fi;
            }
            if (fi == factors.size()) break;
            const std::uint64_t gap = factors[fi].position - t;
            advance_measure(v, next, w, gap);
            t = factors[fi].position;
        }
        double total = 0.0;
        for (double x : v) total += x;
        return total;
    }

    double mean(const Observable& obs) const { return product_expectation({{0, &obs}}); }

    double second_moment(const Observable& obs) const {
        return product_expectation({{0, &obs}, {0, &obs}});
    }

    // E X(0) Y(lag) - EX EY with the i.i.d. disjoint-window case pinned to
    // exactly zero.
    double cross_covariance(const Observable& x, const Observable& y, std::uint64_t lag) const {
        // Disjoint windows on an i.i.d. model are independent: exactly zero.
        if (view_.iid && lag >= x.window()) return 0.0;
        const double joint = (lag == 0 && &x == &y)
                                 ? second_moment(x)
                                 : product_expectation({{0, &x}, {lag, &y}});
        return joint - mean(x) * mean(y);
    }

    double autocovariance(const Observable& obs, std::uint64_t lag) const {
        return cross_covariance(obs, obs, lag);
    }

    // Exact alpha-mixing coefficient of the chain. For a finite Markov chain
    // the sup over the full past/future sigma-algebras is attained on
    // single-coordinate events: conditional probabilities enter the defect
    // bilinearly, so the maximum sits at indicator vertices.
    double alpha_exact(std::uint64_t n) const {
        const std::size_t s = view_.states;
        if (s > kMaxEventBits) throw TooLargeError("alpha enumeration infeasible for this S");
        if (view_.iid && n >= 1) return 0.0;
        std::vector<double> m2(s * s, 0.0);
        const SquareMatrix pn = ladder_.matrix_for_gap(n);
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                m2[i * s + j] = view_.stationary[i] * (pn(i, j) - view_.stationary[j]);
            }
        }
        return max_event_imbalance(m2, s, s);
    }

    // Alpha restricted to events on w-windows whose sigma-algebras are
    // separated by n. Coincides with alpha_exact(n) for Markov chains; kept
    // as the independently enumerated quantity the mixing lab reports.
    double alpha_window_exact(std::size_t w, std::uint64_t n) const {
        const std::size_t tuple_count = lift_count(w);
        if (tuple_count > kMaxEventBits) {
            throw TooLargeError("window event enumeration infeasible: 2^" +
                                std::to_string(tuple_count) + " events");
        }
        const std::vector<double> m = window_pair_defect(w, n);
        return max_event_imbalance(m, tuple_count, tuple_count);
    }

    // max over +-1-valued window functions Y, Z of |E(YZ) - EY EZ| at
    // sigma-algebra separation n.
    double signed_function_cov_max(std::size_t w, std::uint64_t n) const {
        const std::size_t tuple_count = lift_count(w);
        if (tuple_count > kMaxEventBits) {
            throw TooLargeError("sign-vector enumeration infeasible");
        }
        const std::vector<double> m = window_pair_defect(w, n);
        double best = 0.0;
        const std::size_t total = static_cast<std::size_t>(1) << tuple_count;
        std::vector<double> col(tuple_count);
        for (std::size_t mask = 0; mask < total; ++mask) {
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t x = 0; x < tuple_count; ++x) {
                const double sign = (mask >> x) & 1 ? 1.0 : -1.0;
                for (std::size_t y = 0; y < tuple_count; ++y) {
                    col[y] += sign * m[x * tuple_count + y];
                }
            }
            double value = 0.0;
            for (double c : col) value += std::abs(c);
            best = std::max(best, value);
        }
        return best;
    }

    const PowerLadder& ladder() const { return ladder_; }

  private:
    static constexpr std::size_t kMaxTupleStates = 1 << 20;
    static constexpr std::size_t kMaxEventBits = 20;

    std::size_t lift_count(std::size_t w) const {
        std::size_t tuple_count = 1;
        for (std::size_t i = 0; i < w; ++i) tuple_count *= view_.states;
        return tuple_count;
    }

    // P(W_0 = x, W_{w-1+n} = y) - P(x)P(y) over w-tuples: the signed defect
    // matrix behind every alpha computation.
    std::vector<double> window_pair_defect(std::size_t w, std::uint64_t n) const {
        const std::size_t s = view_.states;
        const std::size_t tuple_count = lift_count(w);
        const std::vector<double> mu = window_law(w);
        const SquareMatrix bridge = ladder_.matrix_for_gap(n);
        std::vector<double> m(tuple_count * tuple_count, 0.0);
        std::vector<std::size_t> digits(w);
        for (std::size_t x = 0; x < tuple_count; ++x) {
            const std::size_t x_last = x % s;
            for (std::size_t y = 0; y < tuple_count; ++y) {
                std::size_t rest = y;
                for (std::size_t i = w; i-- > 0;) {
                    digits[i] = rest % s;
                    rest /= s;
                }
                double path = bridge(x_last, digits[0]);
                for (std::size_t i = 0; i + 1 < w; ++i) {
                    path *= view_.transition(digits[i], digits[i + 1]);
                }
                m[x * tuple_count + y] = mu[x] * path - mu[x] * mu[y];
            }
        }
        return m;
    }

    // max over event pairs (A,B) of |sum_{x in A, y in B} M[x][y]|. For a
    // fixed A the optimal B keeps the positive column sums, so only the A
    // side is enumerated. Row sums vanish, making the two signs symmetric.
    static double max_event_imbalance(const std::vector<double>& m, std::size_t rows,
                                      std::size_t cols) {
        if (rows > kMaxEventBits) throw TooLargeError("event enumeration infeasible");
        double best = 0.0;
        const std::size_t total = static_cast<std::size_t>(1) << rows;
        std::vector<double> col(cols);
        for (std::size_t mask = 1; mask < total; ++mask) {
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t i = 0; i < rows; ++i) {
                if (!((mask >> i) & 1)) continue;
                for (std::size_t jj = 0; jj < cols; ++jj) col[jj] += m[i * cols + jj];
            }
            double pos = 0.0;
            for (double c : col) {
                if (c > 0.0) pos += c;
            }
            best = std::max(best, pos);
        }
        return best;
    }

    void apply_factor(std::vector<double>& v, const Observable& obs, std::size_t w) const {
        const std::size_t s = view_.states;
        const std::size_t tuple_count = v.size();
        // The observable reads the first obs.window() states of the tuple.
        std::size_t suffix = 1;
        for (std::size_t i = 0; i < w - obs.window(); ++i) suffix *= s;
        for (std::size_t packed = 0; packed < tuple_count; ++packed) {
            v[packed] *= obs.value_packed(packed / suffix);
        }
    }

    void advance_measure(std::vector<double>& v, std::vector<double>& scratch, std::size_t w,
                         std::uint64_t gap) const {
        const std::size_t s = view_.states;
        if (w == 1) {
            v = ladder_.advance(std::move(v), gap);
            return;
        }
        if (gap < w) {
            for (std::uint64_t step = 0; step < gap; ++step) {
                lifted_step(v, scratch, w);
            }
            return;
        }
        // Far jump: collapse to the last coordinate, bridge, re-expand with
        // the in-window path weights. Exact because the future window depends
        // on the past only through the state at the window start.
        std::vector<double> u(s, 0.0);
        for (std::size_t packed = 0; packed < v.size(); ++packed) u[packed % s] += v[packed];
        u = ladder_.advance(std::move(u), gap - (w - 1));
        std::vector<std::size_t> digits(w);
        for (std::size_t packed = 0; packed < v.size(); ++packed) {
            std::size_t rest = packed;
            for (std::size_t i = w; i-- > 0;) {
                digits[i] = rest % s;
                rest /= s;
            }
            double p = u[digits[0]];
            for (std::size_t i = 0; i + 1 < w; ++i) p *= view_.transition(digits[i], digits[i + 1]);
            v[packed] = p;
        }
    }

    void lifted_step(std::vector<double>& v, std::vector<double>& scratch, std::size_t w) const {
        const std::size_t s = view_.states;
        const std::size_t tuple_count = v.size();
        std::fill(scratch.begin(), scratch.end(), 0.0);
        for (std::size_t packed = 0; packed < tuple_count; ++packed) {
            const double p = v[packed];
            if (p == 0.0) continue;
            const std::size_t tail = (packed % (tuple_count / s)) * s;
            const std::size_t last = packed % s;
            for (std::size_t nxt = 0; nxt < s; ++nxt) {
                scratch[tail + nxt] += p * view_.transition(last, nxt);
            }
        }
        v.swap(scratch);
    }

    ChainView view_;
    PowerLadder ladder_;
};

// Closed-form first/second moments plus lagged (cross) covariances.
struct MomentReport {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double second_moment_a = 0.0;
    double autocov = 0.0;
    double crosscov = 0.0;
};

inline MomentReport exact_moments(const ProcessEnsemble& ensemble, int j, int j2,
                                  std::uint64_t lag) {
    if (std::holds_alternative<BernoulliShiftModel>(ensemble.model) ||
        std::holds_alternative<IidModel>(ensemble.model) || is_markov(ensemble.model)) {
        ExactLaw law(ensemble.model);
        const Observable& a = ensemble.by_j(j);
        const Observable& b = ensemble.by_j(j2);
        MomentReport report;
        report.mean_a = law.mean(a);
        report.mean_b = law.mean(b);
        report.second_moment_a = law.second_moment(a);
        report.autocov = law.autocovariance(a, lag);
        report.crosscov = law.cross_covariance(a, b, lag);
        return report;
    }
    throw UnsupportedModelError("no closed-form moments for this model kind");
}

} // namespace splitlab

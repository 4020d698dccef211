#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "splitlab/errors.hpp"
#include "splitlab/markov.hpp"

namespace splitlab {

inline constexpr std::size_t kMaxStates = 64;

// Finite discrete law. `values` carry the numeric labels of the states; a
// default (identity) observable reads them directly.
struct DiscreteLaw {
    std::vector<double> values;
    std::vector<double> probs;
};

struct IidModel {
    DiscreteLaw law;
};

struct FiniteMarkovModel {
    SquareMatrix transition;
    std::vector<double> stationary; // may be empty; computed on validation
    std::vector<double> state_values; // optional numeric labels
};

// Symbolic doubling-map model: i.i.d. bits, window observables read the
// binary expansion.
struct BernoulliShiftModel {
    double bit_prob = 0.5;
};

using ProcessModel = std::variant<IidModel, FiniteMarkovModel, BernoulliShiftModel>;

inline std::size_t state_count(const ProcessModel& model) {
    if (const auto* iid = std::get_if<IidModel>(&model)) return iid->law.probs.size();
    if (const auto* mk = std::get_if<FiniteMarkovModel>(&model)) return mk->transition.size();
    return 2;
}

inline bool is_markov(const ProcessModel& model) {
    return std::holds_alternative<FiniteMarkovModel>(model);
}

inline std::string model_kind(const ProcessModel& model) {
    if (std::holds_alternative<IidModel>(model)) return "iid";
    if (std::holds_alternative<FiniteMarkovModel>(model)) return "finite_markov";
    return "bernoulli_shift";
}

// Uniform view used by every exact-law computation: state count, one-step
// kernel, stationary row. For i.i.d. models every kernel row equals pi, so
// the Markov machinery covers all three model kinds.
struct ChainView {
    std::size_t states = 0;
    SquareMatrix transition;
    std::vector<double> stationary;
    bool iid = false;
};

inline ChainView chain_view(const ProcessModel& model) {
    ChainView view;
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        view.states = iid->law.probs.size();
        view.stationary = iid->law.probs;
        view.iid = true;
    } else if (const auto* shift = std::get_if<BernoulliShiftModel>(&model)) {
        view.states = 2;
        view.stationary = {1.0 - shift->bit_prob, shift->bit_prob};
        view.iid = true;
    } else {
        const auto& mk = std::get<FiniteMarkovModel>(model);
        view.states = mk.transition.size();
        view.transition = mk.transition;
        view.stationary =
            mk.stationary.empty() ? stationary_distribution(mk.transition) : mk.stationary;
        view.iid = false;
        return view;
    }
    view.transition = SquareMatrix(view.states);
    for (std::size_t i = 0; i < view.states; ++i) {
        for (std::size_t j = 0; j < view.states; ++j) {
            view.transition(i, j) = view.stationary[j];
        }
    }
    return view;
}

struct ValidationReport {
    std::vector<double> stationary;
    std::size_t doeblin_power = 0;
    double doeblin_floor = 0.0;
    double lambda2_modulus = 0.0;
};

inline ValidationReport validate_model(const ProcessModel& model) {
    ValidationReport report;
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        if (iid->law.probs.empty() || iid->law.probs.size() != iid->law.values.size()) {
            throw NonStochasticError("iid law needs matching value/prob lists");
        }
        if (iid->law.probs.size() > kMaxStates) {
            throw TooLargeError("iid support exceeds " + std::to_string(kMaxStates));
        }
        double sum = 0.0;
        for (double p : iid->law.probs) {
            if (p < 0.0) throw NonStochasticError("negative probability in iid law");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw NonStochasticError("iid probabilities sum to " + std::to_string(sum));
        }
        report.stationary = iid->law.probs;
        report.doeblin_power = 1;
        report.doeblin_floor = *std::min_element(iid->law.probs.begin(), iid->law.probs.end());
        report.lambda2_modulus = 0.0;
        return report;
    }
    if (const auto* shift = std::get_if<BernoulliShiftModel>(&model)) {
        if (shift->bit_prob <= 0.0 || shift->bit_prob >= 1.0) {
            throw NonStochasticError("bit_prob must lie strictly inside (0,1)");
        }
        report.stationary = {1.0 - shift->bit_prob, shift->bit_prob};
        report.doeblin_power = 1;
        report.doeblin_floor = std::min(shift->bit_prob, 1.0 - shift->bit_prob);
        report.lambda2_modulus = 0.0;
        return report;
    }

    const auto& mk = std::get<FiniteMarkovModel>(model);
    const std::size_t n = mk.transition.size();
    if (n == 0 || n > kMaxStates) {
        throw TooLargeError("state count must lie in [1, " + std::to_string(kMaxStates) + "]");
    }
    check_row_stochastic(mk.transition);
    const DoeblinCertificate doeblin = doeblin_certificate(mk.transition);
    report.doeblin_power = doeblin.power;
    report.doeblin_floor = doeblin.floor;
    report.stationary = stationary_distribution(mk.transition);
    if (!mk.stationary.empty()) {
        if (mk.stationary.size() != n) {
            throw NotStationaryError("supplied stationary vector has wrong length");
        }
        const std::vector<double> advanced = row_times_matrix(mk.stationary, mk.transition);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(advanced[i] - mk.stationary[i]) > 1e-12 ||
                std::abs(mk.stationary[i] - report.stationary[i]) > 1e-9) {
                throw NotStationaryError("supplied pi is not invariant under P");
            }
        }
        report.stationary = mk.stationary;
    }
    report.lambda2_modulus = second_eigenvalue_modulus(mk.transition);
    return report;
}

// Window observable: a locally constant function of `window` consecutive
// states. Being a finite-window function makes beta_j(n) vanish once the
// conditioning window covers it, so the mixing assumption holds exactly.
class Observable {
  public:
    Observable() = default;
    Observable(int j, std::size_t window, std::size_t states, std::vector<double> table,
               double bound)
        : j_(j), window_(window), states_(states), table_(std::move(table)), bound_(bound) {
        std::size_t expected = 1;
        for (std::size_t i = 0; i < window_; ++i) expected *= states_;
        if (window_ == 0 || table_.size() != expected) {
            throw InvalidObservableError("table size must be states^window");
        }
        for (double v : table_) {
            if (std::abs(v) > bound_ + 1e-15) {
                throw InvalidObservableError("observable value exceeds bound D");
            }
        }
    }

    int j() const { return j_; }
    std::size_t window() const { return window_; }
    std::size_t states() const { return states_; }
    double bound() const { return bound_; }
    const std::vector<double>& table() const { return table_; }

    // Earliest state first: index = s_0 * S^(w-1) + ... + s_(w-1).
    double value(const std::uint8_t* window_states) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < window_; ++i) idx = idx * states_ + window_states[i];
        return table_[idx];
    }

    double value_packed(std::size_t packed_index) const { return table_[packed_index]; }

    double sup_norm() const {
        double m = 0.0;
        for (double v : table_) m = std::max(m, std::abs(v));
        return m;
    }

    // beta(n) = 0 once F_{m-n,m+n} covers the window [m, m+w-1].
    double beta(std::uint64_t n) const {
        return (n + 1 >= window_) ? 0.0 : 2.0 * sup_norm();
    }

  private:
    int j_ = 0;
    std::size_t window_ = 1;
    std::size_t states_ = 0;
    std::vector<double> table_;
    double bound_ = 0.0;
};

inline Observable identity_observable(const ProcessModel& model, int j) {
    if (const auto* iid = std::get_if<IidModel>(&model)) {
        double bound = 0.0;
        for (double v : iid->law.values) bound = std::max(bound, std::abs(v));
        return Observable(j, 1, iid->law.values.size(), iid->law.values, bound);
    }
    if (std::holds_alternative<BernoulliShiftModel>(model)) {
        return Observable(j, 1, 2, {0.0, 1.0}, 1.0);
    }
    const auto& mk = std::get<FiniteMarkovModel>(model);
    if (mk.state_values.size() != mk.transition.size()) {
        throw InvalidObservableError("model carries no state values for an identity observable");
    }
    double bound = 0.0;
    for (double v : mk.state_values) bound = std::max(bound, std::abs(v));
    return Observable(j, 1, mk.transition.size(), mk.state_values, bound);
}

// Mixing-rate certificate alpha(n) <= C * rho^n, with the equivalent
// kappa^{-1} e^{-kappa n} exponent.
struct MixingBound {
    double constant = 0.0; // C
    double rate = 0.0;     // rho in [0,1)
    double kappa_equivalent = 0.0;
};

inline MixingBound mixing_bounds(const ProcessModel& model) {
    MixingBound bound;
    if (!is_markov(model)) {
        validate_model(model);
        bound.constant = 0.25;
        bound.rate = 0.0;
        bound.kappa_equivalent = 1.0 / bound.constant;
        return bound;
    }
    const auto& mk = std::get<FiniteMarkovModel>(model);
    check_row_stochastic(mk.transition);
    const DoeblinCertificate doeblin = doeblin_certificate(mk.transition);
    const SquareMatrix pm = matrix_power(mk.transition, doeblin.power);
    const double delta = dobrushin_coefficient(pm);
    if (delta >= 1.0) {
        throw NotDoeblinError("Dobrushin coefficient of the Doeblin power is not below 1");
    }
    // alpha(n) <= 2 * delta^{floor(n/m)} <= (2/delta) * (delta^{1/m})^n.
    bound.rate = (delta == 0.0) ? 0.0
                                : std::pow(delta, 1.0 / static_cast<double>(doeblin.power));
    bound.constant = (delta == 0.0) ? 0.25 : 2.0 / delta;
    bound.kappa_equivalent = (bound.rate == 0.0)
                                 ? 1.0 / bound.constant
                                 : std::min(-std::log(bound.rate), 1.0 / bound.constant);
    return bound;
}

// Stationary model plus observables X_0..X_l sharing it, with the global
// bound D = max_j D_j.
struct ProcessEnsemble {
    ProcessModel model;
    std::vector<Observable> observables; // ordered by j; j may start at 0 or 1
    double bound = 0.0;

    ProcessEnsemble(ProcessModel m, std::vector<Observable> obs)
        : model(std::move(m)), observables(std::move(obs)) {
        if (observables.empty()) throw InvalidObservableError("ensemble needs observables");
        const std::size_t s = state_count(model);
        int expected = observables.front().j();
        if (expected != 0 && expected != 1) {
            throw InvalidObservableError("observable indices must start at 0 or 1");
        }
        for (const Observable& o : observables) {
            if (o.states() != s) {
                throw InvalidObservableError("observable state space does not match the model");
            }
            if (o.j() != expected++) {
                throw InvalidObservableError("observable indices must be consecutive");
            }
            bound = std::max(bound, o.bound());
        }
        if (max_j() < 1) throw InvalidObservableError("ensemble needs l >= 1");
    }

    bool has_x0() const { return observables.front().j() == 0; }
    int max_j() const { return observables.back().j(); }
    std::size_t max_window() const {
        std::size_t w = 1;
        for (const Observable& o : observables) w = std::max(w, o.window());
        return w;
    }
    const Observable& by_j(int j) const { return observables[static_cast<std::size_t>(j - observables.front().j())]; }
};

// X_1(n) = g(xi_{n+1}) - g(xi_n) + a1: a window-2 coboundary whose centered
// partial sums telescope to g(xi_{N+1}) - g(xi_0), the exact sigma_1 = 0 case.
inline Observable coboundary_observable(const FiniteMarkovModel& model,
                                        const std::vector<double>& g, double a1) {
    const std::size_t s = model.transition.size();
    if (g.size() != s) throw InvalidObservableError("g must assign a value to every state");
    std::vector<double> table(s * s, 0.0);
    double max_g = 0.0;
    for (double v : g) max_g = std::max(max_g, std::abs(v));
    for (std::size_t s0 = 0; s0 < s; ++s0) {
        for (std::size_t s1 = 0; s1 < s; ++s1) {
            table[s0 * s + s1] = g[s1] - g[s0] + a1;
        }
    }
    return Observable(1, 2, s, std::move(table), 2.0 * max_g + std::abs(a1));
}

} // namespace splitlab

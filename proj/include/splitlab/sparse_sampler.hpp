#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "splitlab/checked.hpp"
#include "splitlab/errors.hpp"
#include "splitlab/exact_law.hpp"
#include "splitlab/process_model.hpp"
#include "splitlab/rng.hpp"

namespace splitlab {

// Total-variation cutoff below which a gap is bridged by a fresh stationary
// draw instead of the g-step kernel. Documented approximation: the bound sits
// below double-precision resolution of any downstream statistic.
inline constexpr double kStationaryCutoff = 1e-14;

// Samples the stationary process at an arbitrary sorted set of absolute
// positions. i.i.d. models are pure counter mode: the state at position p is
// a function of (seed, stream, p) alone. Markov models walk the sorted
// positions, bridging each gap through precomputed squarings of P.
class SparseSampler {
  public:
    SparseSampler(const ProcessModel& model, std::vector<std::uint64_t> positions)
        : positions_(std::move(positions)), view_(chain_view(model)) {
        for (std::size_t i = 0; i + 1 < positions_.size(); ++i) {
            if (positions_[i] >= positions_[i + 1]) {
                throw UnsortedIndicesError("positions must be strictly increasing");
            }
        }
        cumulative_pi_.resize(view_.states);
        double acc = 0.0;
        for (std::size_t s = 0; s < view_.states; ++s) {
            acc += view_.stationary[s];
            cumulative_pi_[s] = acc;
        }
        if (!view_.iid) prepare_gap_kernels(model);
    }

    const std::vector<std::uint64_t>& positions() const { return positions_; }
    std::size_t states() const { return view_.states; }

    // States at every position, in position order.
    void draw(std::uint64_t seed, std::uint64_t stream, std::vector<std::uint8_t>& out) const {
        out.resize(positions_.size());
        if (view_.iid) {
            for (std::size_t i = 0; i < positions_.size(); ++i) {
                out[i] = pick(cumulative_pi_, rng_uniform(seed, stream, positions_[i]));
            }
            return;
        }
        std::uint8_t state = 0;
        std::vector<double> row;
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const double u = rng_uniform(seed, stream, positions_[i]);
            if (i == 0 || steps_[i] == kFreshDraw) {
                state = pick(cumulative_pi_, u);
            } else if (steps_[i] == kViaLadder) {
                row.assign(view_.states, 0.0);
                row[state] = 1.0;
                row = ladder_->advance(std::move(row), positions_[i] - positions_[i - 1]);
                double acc = 0.0;
                std::uint8_t chosen = static_cast<std::uint8_t>(view_.states - 1);
                for (std::size_t s = 0; s < view_.states; ++s) {
                    acc += row[s];
                    if (u < acc) {
                        chosen = static_cast<std::uint8_t>(s);
                        break;
                    }
                }
                state = chosen;
            } else {
                const std::vector<double>& cdf = kernel_rows_[steps_[i]];
                state = pick_row(cdf, state, u);
            }
            out[i] = state;
        }
    }

  private:
    static constexpr std::uint32_t kFreshDraw = 0xFFFFFFFFu;
    static constexpr std::uint32_t kViaLadder = 0xFFFFFFFEu;
    // Cap on cached g-step kernels (doubles) before falling back to on-the-fly
    // row advances through the squaring ladder.
    static constexpr std::size_t kKernelCacheBudget = std::size_t(1) << 22;

    static std::uint8_t pick(const std::vector<double>& cdf, double u) {
        for (std::size_t s = 0; s + 1 < cdf.size(); ++s) {
            if (u < cdf[s]) return static_cast<std::uint8_t>(s);
        }
        return static_cast<std::uint8_t>(cdf.size() - 1);
    }

    std::uint8_t pick_row(const std::vector<double>& cdf, std::uint8_t row, double u) const {
        const std::size_t s = view_.states;
        const double* base = cdf.data() + static_cast<std::size_t>(row) * s;
        for (std::size_t k = 0; k + 1 < s; ++k) {
            if (u < base[k]) return static_cast<std::uint8_t>(k);
        }
        return static_cast<std::uint8_t>(s - 1);
    }

    void prepare_gap_kernels(const ProcessModel& model) {
        const MixingBound mixing = mixing_bounds(model);
        ladder_ = std::make_shared<PowerLadder>(view_.transition);
        steps_.assign(positions_.size(), kFreshDraw);
        std::unordered_map<std::uint64_t, std::uint32_t> by_gap;
        const std::size_t s2 = view_.states * view_.states;
        std::uint64_t max_gap = 0;
        for (std::size_t i = 1; i < positions_.size(); ++i) {
            const std::uint64_t gap = positions_[i] - positions_[i - 1];
            const double tv_bound =
                mixing.constant * std::pow(mixing.rate, static_cast<double>(gap));
            if (!(tv_bound >= kStationaryCutoff)) continue; // below cutoff: fresh stationary draw
            auto it = by_gap.find(gap);
            if (it == by_gap.end()) {
                if ((kernel_rows_.size() + 1) * s2 > kKernelCacheBudget) {
                    steps_[i] = kViaLadder;
                    max_gap = std::max(max_gap, gap);
                    continue;
                }
                const SquareMatrix kernel = ladder_->matrix_for_gap(gap);
                std::vector<double> cdf(s2);
                for (std::size_t r = 0; r < view_.states; ++r) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < view_.states; ++c) {
                        acc += kernel(r, c);
                        cdf[r * view_.states + c] = acc;
                    }
                }
                it = by_gap.emplace(gap, static_cast<std::uint32_t>(kernel_rows_.size())).first;
                kernel_rows_.push_back(std::move(cdf));
            }
            steps_[i] = it->second;
        }
        // Pre-grow the ladder so concurrent draws never mutate it.
        if (max_gap > 0) {
            std::size_t bit = 0;
            while (max_gap >> bit) ++bit;
            ladder_->power_of_two(bit);
        }
    }

    std::vector<std::uint64_t> positions_;
    ChainView view_;
    std::vector<double> cumulative_pi_;
    std::vector<std::uint32_t> steps_;             // per position: kernel id / fresh / ladder
    std::vector<std::vector<double>> kernel_rows_; // row-cumulative g-step kernels
    std::shared_ptr<PowerLadder> ladder_;
};

// Spec-level operation: window of length max_window(ensemble) at every
// requested index, exactly stationary across the requested set.
inline std::map<std::uint64_t, std::vector<std::uint8_t>>
sparse_sample(const ProcessEnsemble& ensemble, const std::vector<std::uint64_t>& indices,
              std::uint64_t seed, std::uint64_t stream) {
    const std::size_t w = ensemble.max_window();
    for (std::size_t i = 0; i + 1 < indices.size(); ++i) {
        if (indices[i] >= indices[i + 1]) {
            throw UnsortedIndicesError("indices must be sorted and unique");
        }
    }
    if (!indices.empty()) {
        const std::uint64_t limit = static_cast<std::uint64_t>(INT64_MAX);
        if (indices.back() > limit - w) {
            throw IndexOverflowError("max index + window exceeds 2^63-1");
        }
    }
    std::vector<std::uint64_t> positions;
    positions.reserve(indices.size() * w);
    for (std::uint64_t idx : indices) {
        for (std::size_t t = 0; t < w; ++t) positions.push_back(idx + t);
    }
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    SparseSampler sampler(ensemble.model, positions);
    std::vector<std::uint8_t> states;
    sampler.draw(seed, stream, states);

    std::unordered_map<std::uint64_t, std::size_t> rank;
    rank.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) rank.emplace(positions[i], i);

    std::map<std::uint64_t, std::vector<std::uint8_t>> out;
    for (std::uint64_t idx : indices) {
        std::vector<std::uint8_t> window(w);
        for (std::size_t t = 0; t < w; ++t) window[t] = states[rank.at(idx + t)];
        out.emplace(idx, std::move(window));
    }
    return out;
}

} // namespace splitlab

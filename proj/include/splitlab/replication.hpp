#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <thread>
#include <unordered_map>
#include <vector>

#include "splitlab/exact_law.hpp"
#include "splitlab/process_model.hpp"
#include "splitlab/rng.hpp"
#include "splitlab/sequences.hpp"
#include "splitlab/sparse_sampler.hpp"
#include "splitlab/stats.hpp"
#include "splitlab/summation.hpp"

namespace splitlab {

// R(n) arithmetic on already-sampled values; the empty product is 1.
inline double r_term(std::span<const double> sampled, std::span<const double> means) {
    double px = 1.0;
    for (double x : sampled) px *= x;
    double pa = 1.0;
    for (double a : means) pa *= a;
    return px - pa;
}

struct PathGrid {
    std::vector<double> grid;   // u values in [0,1]
    std::vector<double> values; // W_N(u)
};

struct ReplicationResult {
    std::uint64_t horizon = 0;
    double normalized_sum = 0.0;
    PathGrid path;
    std::uint64_t seed = 0;
    std::uint64_t replication_id = 0;
};

// Precomputes everything shared across replications of one experiment: the
// deduplicated index union (so cross-j dependence is exact), per-term ranks
// into it, gap kernels, and exact means. run() is const and thread-safe;
// parallel replications use distinct streams, so results are independent of
// scheduling.
class ReplicationEngine {
  public:
    ReplicationEngine(std::shared_ptr<const ProcessEnsemble> ensemble, SequenceFamily family,
                      std::uint64_t horizon, std::vector<double> grid = {})
        : ensemble_(std::move(ensemble)), family_(std::move(family)), horizon_(horizon),
          grid_(std::move(grid)) {
        if (horizon_ < 1) throw ConfigError("horizon N must be at least 1");
        const int fj = family_.first_j();
        const int lj = family_.max_j();
        if (ensemble_->observables.front().j() > fj || ensemble_->max_j() < lj) {
            throw ConfigError("ensemble does not cover the family's observable range");
        }
        for (int j = fj; j <= lj; ++j) active_.push_back(&ensemble_->by_j(j));

        ExactLaw law(ensemble_->model);
        mean_product_ = 1.0;
        for (const Observable* obs : active_) {
            means_.push_back(law.mean(*obs));
            mean_product_ *= means_.back();
        }

        std::vector<std::uint64_t> positions;
        positions.reserve((horizon_ + 1) * active_.size() * 2);
        term_start_.resize((horizon_ + 1) * active_.size());
        for (std::uint64_t n = 0; n <= horizon_; ++n) {
            for (std::size_t k = 0; k < active_.size(); ++k) {
                const std::int64_t q =
                    evaluate(family_, fj + static_cast<int>(k), static_cast<std::int64_t>(n));
                for (std::size_t t = 0; t < active_[k]->window(); ++t) {
                    positions.push_back(static_cast<std::uint64_t>(q) + t);
                }
            }
        }
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
        std::unordered_map<std::uint64_t, std::uint32_t> rank;
        rank.reserve(positions.size() * 2);
        for (std::size_t i = 0; i < positions.size(); ++i) {
            rank.emplace(positions[i], static_cast<std::uint32_t>(i));
        }
        for (std::uint64_t n = 0; n <= horizon_; ++n) {
            for (std::size_t k = 0; k < active_.size(); ++k) {
                const std::int64_t q =
                    evaluate(family_, fj + static_cast<int>(k), static_cast<std::int64_t>(n));
                term_start_[n * active_.size() + k] = rank.at(static_cast<std::uint64_t>(q));
            }
        }
        sampler_ = std::make_unique<SparseSampler>(ensemble_->model, std::move(positions));

        cuts_.reserve(grid_.size());
        for (double u : grid_) {
            if (u < 0.0 || u > 1.0) throw ConfigError("path grid must lie in [0,1]");
            cuts_.push_back(static_cast<std::uint64_t>(
                std::floor(u * static_cast<double>(horizon_))));
        }
    }

    std::uint64_t horizon() const { return horizon_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& means() const { return means_; }
    double mean_product() const { return mean_product_; }

    // Raw sums S_P = sum_{n=0}^{P} R(n) at the requested prefix ends.
    // `prefix_ends` must be sorted; results align with it.
    void run_prefix_sums(std::uint64_t seed, std::uint64_t replication_id,
                         std::span<const std::uint64_t> prefix_ends,
                         std::vector<double>& out) const {
        out.assign(prefix_ends.size(), 0.0);
        std::vector<std::uint8_t> states;
        sampler_->draw(seed, make_stream(replication_id, 0), states);
        CompensatedSum acc;
        std::size_t cut_idx = 0;
        for (std::uint64_t n = 0; n <= horizon_; ++n) {
            double product = 1.0;
            for (std::size_t k = 0; k < active_.size(); ++k) {
                const Observable& obs = *active_[k];
                const std::uint32_t start = term_start_[n * active_.size() + k];
                product *= obs.value(&states[start]);
            }
            acc.add(product - mean_product_);
            while (cut_idx < prefix_ends.size() && prefix_ends[cut_idx] == n) {
                out[cut_idx++] = acc.value();
            }
        }
        while (cut_idx < prefix_ends.size()) out[cut_idx++] = acc.value();
    }

    ReplicationResult run(std::uint64_t seed, std::uint64_t replication_id) const {
        std::vector<std::uint64_t> ends = cuts_;
        ends.push_back(horizon_);
        std::sort(ends.begin(), ends.end());
        std::vector<double> sums;
        run_prefix_sums(seed, replication_id, ends, sums);

        const double scale = 1.0 / std::sqrt(static_cast<double>(horizon_));
        ReplicationResult result;
        result.horizon = horizon_;
        result.seed = seed;
        result.replication_id = replication_id;
        result.normalized_sum = sums.back() * scale;
        result.path.grid = grid_;
        result.path.values.resize(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const auto it = std::lower_bound(ends.begin(), ends.end(), cuts_[i]);
            result.path.values[i] = sums[static_cast<std::size_t>(it - ends.begin())] * scale;
        }
        return result;
    }

    double normalized_sum(std::uint64_t seed, std::uint64_t replication_id) const {
        const std::uint64_t end = horizon_;
        std::vector<double> sums;
        run_prefix_sums(seed, replication_id, std::span<const std::uint64_t>(&end, 1), sums);
        return sums[0] / std::sqrt(static_cast<double>(horizon_));
    }

  private:
    std::shared_ptr<const ProcessEnsemble> ensemble_;
    SequenceFamily family_;
    std::uint64_t horizon_;
    std::vector<double> grid_;
    std::vector<std::uint64_t> cuts_;
    std::vector<const Observable*> active_;
    std::vector<double> means_;
    double mean_product_ = 1.0;
    std::vector<std::uint32_t> term_start_;
    std::unique_ptr<SparseSampler> sampler_;
};

// Deterministic parallel map over replication ids: work items are indexed,
// results land by index, so thread count never changes any output.
template <typename Fn>
void parallel_replications(std::size_t replications, unsigned threads, Fn&& body) {
    const unsigned worker_count =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replications)));
    if (worker_count == 1) {
        for (std::size_t i = 0; i < replications; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
        workers.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= replications) break;
                body(i);
            }
        });
    }
    for (std::thread& t : workers) t.join();
}

struct OracleEstimate {
    double var_hat = 0.0;
    double stderr_hat = 0.0;
    std::size_t replications = 0;
};

// Monte Carlo estimate of E(sum_{n<=N} R(n))^2 / N with a jackknife standard
// error: the independent cross-check for every closed-form variance.
inline OracleEstimate variance_oracle(const ReplicationEngine& engine, std::size_t replications,
                                      std::uint64_t seed, unsigned threads) {
    std::vector<double> squared(replications, 0.0);
    parallel_replications(replications, threads, [&](std::size_t rep) {
        const double s = engine.normalized_sum(seed, rep);
        squared[rep] = s * s;
    });
    OracleEstimate out;
    out.replications = replications;
    out.var_hat = compensated_total(squared) / static_cast<double>(replications);
    out.stderr_hat = jackknife_stderr_mean(squared);
    return out;
}

// Convenience wrapper matching the per-operation signature.
inline ReplicationResult normalized_sum_and_path(std::shared_ptr<const ProcessEnsemble> ensemble,
                                                 const SequenceFamily& family, std::uint64_t N,
                                                 std::vector<double> grid, std::uint64_t seed,
                                                 std::uint64_t replication_id) {
    ReplicationEngine engine(std::move(ensemble), family, N, std::move(grid));
    return engine.run(seed, replication_id);
}

} // namespace splitlab

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "splitlab/errors.hpp"

namespace splitlab {

// Dense row-major square matrix sized for state counts <= 64.
class SquareMatrix {
  public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const std::vector<double>& data() const { return data_; }

    SquareMatrix operator*(const SquareMatrix& rhs) const {
        SquareMatrix out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t k = 0; k < n_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < n_; ++j) {
                    out(i, j) += a * rhs(k, j);
                }
            }
        }
        return out;
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline std::vector<double> row_times_matrix(const std::vector<double>& row, const SquareMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = row[i];
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out[j] += a * m(i, j);
    }
    return out;
}

inline SquareMatrix matrix_power(const SquareMatrix& m, std::uint64_t e) {
    SquareMatrix acc = SquareMatrix::identity(m.size());
    SquareMatrix base = m;
    while (e > 0) {
        if (e & 1ULL) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return acc;
}

// Binary squarings P^(2^k), k = 0..62; lets a row be pushed through P^g for
// any 63-bit gap g in O(S^2 log g).
class PowerLadder {
  public:
    explicit PowerLadder(const SquareMatrix& p) { powers_.push_back(p); }

    const SquareMatrix& power_of_two(std::size_t k) const {
        while (powers_.size() <= k) {
            const SquareMatrix& top = powers_.back();
            powers_.push_back(top * top);
        }
        return powers_[k];
    }

    std::vector<double> advance(std::vector<double> row, std::uint64_t gap) const {
        std::size_t bit = 0;
        while (gap > 0) {
            if (gap & 1ULL) row = row_times_matrix(row, power_of_two(bit));
            gap >>= 1;
            ++bit;
        }
        return row;
    }

    SquareMatrix matrix_for_gap(std::uint64_t gap) const {
        SquareMatrix acc = SquareMatrix::identity(powers_.front().size());
        std::size_t bit = 0;
        while (gap > 0) {
            if (gap & 1ULL) acc = acc * power_of_two(bit);
            gap >>= 1;
            ++bit;
        }
        return acc;
    }

  private:
    mutable std::vector<SquareMatrix> powers_;
};

inline void check_row_stochastic(const SquareMatrix& p, double tol = 1e-12) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (p(i, j) < 0.0) {
                throw NonStochasticError("negative transition probability at row " +
                                         std::to_string(i));
            }
            sum += p(i, j);
        }
        if (std::abs(sum - 1.0) > tol) {
            throw NonStochasticError("row " + std::to_string(i) + " sums to " +
                                     std::to_string(sum));
        }
    }
}

// Smallest m <= S^2 with all entries of P^m >= delta > 0, plus that floor.
struct DoeblinCertificate {
    std::size_t power = 0;
    double floor = 0.0;
};

inline DoeblinCertificate doeblin_certificate(const SquareMatrix& p) {
    const std::size_t n = p.size();
    const std::size_t max_power = n * n;
    SquareMatrix q = p;
    for (std::size_t m = 1; m <= max_power; ++m) {
        double min_entry = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) min_entry = std::min(min_entry, q(i, j));
        }
        if (min_entry > 0.0) return {m, min_entry};
        q = q * p;
    }
    throw NotDoeblinError("no power P^m with strictly positive entries for m <= " +
                          std::to_string(max_power));
}

// Dobrushin ergodicity coefficient: max over row pairs of half the L1 row gap.
inline double dobrushin_coefficient(const SquareMatrix& p) {
    const std::size_t n = p.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            double l1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) l1 += std::abs(p(i, j) - p(k, j));
            worst = std::max(worst, 0.5 * l1);
        }
    }
    return worst;
}

inline std::vector<double> stationary_distribution(const SquareMatrix& p) {
    const std::size_t n = p.size();
    // Solve pi (P - I) = 0 with sum(pi) = 1 as a least-squares-free linear
    // system: transpose, replace one equation by the normalization.
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                p(j, i) - (i == j ? 1.0 : 0.0);
        }
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(j)) = 1.0;
    b(static_cast<Eigen::Index>(n - 1)) = 1.0;
    Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
    std::vector<double> out(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::max(0.0, pi(static_cast<Eigen::Index>(i)));
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

// Modulus of the subdominant eigenvalue.
inline double second_eigenvalue_modulus(const SquareMatrix& p) {
    const std::size_t n = p.size();
    if (n == 1) return 0.0;
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p(i, j);
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    std::vector<double> mods;
    mods.reserve(n);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        mods.push_back(std::abs(solver.eigenvalues()(i)));
    }
    std::sort(mods.begin(), mods.end(), std::greater<double>());
    return mods.size() > 1 ? mods[1] : 0.0;
}

} // namespace splitlab

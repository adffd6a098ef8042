#pragma once

// Up-looking sparse LDL' factorization for quasi-definite KKT matrices.
// No pivoting: each pivot has a prescribed sign, and pivots that come out
// with the wrong sign or too small are replaced by sign * delta.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

namespace acrelax {

class SparseLdl {
public:
    struct Settings {
        double pivot_eps = 1e-13;
        double pivot_delta = 1e-7;
    };

    SparseLdl() = default;
    explicit SparseLdl(Settings s) : settings_(s) {}

    /// `upper` holds the upper triangle (including diagonal) of a symmetric
    /// matrix; `signs[i]` is +1 or -1. Returns false on structural failure.
    /// When `leading` > 0 the indices [0, leading) are eliminated before all
    /// others, so the trailing block is factored as a Schur complement. The
    /// ordering is cached and reused while n, nnz and `leading` are unchanged.
    bool factor(const Eigen::SparseMatrix<double, Eigen::ColMajor, int>& upper,
                const std::vector<std::int8_t>& signs, int leading = 0);

    /// In-place solve with the (regularized) factorization.
    void solve(Eigen::Ref<Eigen::VectorXd> x) const;

    int size() const noexcept { return n_; }
    int num_regularized() const noexcept { return regularized_; }
    long factor_nonzeros() const noexcept { return static_cast<long>(li_.size()); }

private:
    Settings settings_;
    int n_ = 0;
    int regularized_ = 0;
    std::vector<int> perm_;   // perm_[new] = old
    long cached_nnz_ = -1;
    int cached_leading_ = -1;
    std::vector<int> lp_, li_;
    std::vector<double> lx_, d_, dinv_;
};

}  // namespace acrelax

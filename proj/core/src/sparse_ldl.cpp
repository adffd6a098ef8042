#include "acrelax/sparse_ldl.hpp"

#include <Eigen/OrderingMethods>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace acrelax {

namespace {

using Sp = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Perm = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

// new -> old
std::vector<int> amd_order(const Sp& full) {
    Perm pinv;
    Eigen::AMDOrdering<int> amd;
    amd(full, pinv);
    const Perm p = pinv.inverse();
    std::vector<int> order(full.rows());
    for (int old = 0; old < full.rows(); ++old) order[p.indices()[old]] = old;
    return order;
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

// Leading block first (AMD within it), trailing block by AMD on the pattern
// of the Schur complement left after eliminating the leading block.
std::vector<int> split_order(const Sp& full, int leading) {
    const int n = static_cast<int>(full.rows());
    const int m = n - leading;
    std::vector<int> parent(leading);
    std::iota(parent.begin(), parent.end(), 0);
    for (int j = 0; j < leading; ++j)
        for (Sp::InnerIterator it(full, j); it; ++it)
            if (it.row() < leading) parent[find_root(parent, j)] = find_root(parent, static_cast<int>(it.row()));

    std::vector<std::vector<int>> touched(leading);
    for (int j = 0; j < leading; ++j) {
        auto& t = touched[find_root(parent, j)];
        for (Sp::InnerIterator it(full, j); it; ++it)
            if (it.row() >= leading) t.push_back(static_cast<int>(it.row()) - leading);
    }
    std::vector<Eigen::Triplet<double, int>> trips;
    for (int i = 0; i < m; ++i) trips.emplace_back(i, i, 1.0);
    for (int j = leading; j < n; ++j)
        for (Sp::InnerIterator it(full, j); it; ++it)
            if (it.row() >= leading) trips.emplace_back(static_cast<int>(it.row()) - leading, j - leading, 1.0);
    for (auto& t : touched) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        for (int a : t)
            for (int b : t) trips.emplace_back(a, b, 1.0);
    }
    Sp schur(m, m);
    schur.setFromTriplets(trips.begin(), trips.end());

    std::vector<int> order = amd_order(full.topLeftCorner(leading, leading));
    for (int i : amd_order(schur)) order.push_back(leading + i);
    return order;
}

}  // namespace

bool SparseLdl::factor(const Sp& upper, const std::vector<std::int8_t>& signs, int leading) {
    n_ = static_cast<int>(upper.rows());
    regularized_ = 0;
    if (upper.cols() != n_ || static_cast<int>(signs.size()) != n_) return false;
    if (leading < 0 || leading > n_) return false;

    if (cached_nnz_ != upper.nonZeros() || cached_leading_ != leading || static_cast<int>(perm_.size()) != n_) {
        const Sp full = upper.selfadjointView<Eigen::Upper>();
        perm_ = (leading > 0 && leading < n_) ? split_order(full, leading) : amd_order(full);
        cached_nnz_ = upper.nonZeros();
        cached_leading_ = leading;
    }
    Perm p(n_);  // old -> new
    for (int k = 0; k < n_; ++k) p.indices()[perm_[k]] = k;

    Sp a(n_, n_);
    a.selfadjointView<Eigen::Upper>() = upper.selfadjointView<Eigen::Upper>().twistedBy(p);
    a.makeCompressed();

    const int* ap = a.outerIndexPtr();
    const int* ai = a.innerIndexPtr();
    const double* ax = a.valuePtr();

    // elimination tree and column counts
    std::vector<int> etree(n_, -1), lnz(n_, 0), work(n_, -1);
    for (int j = 0; j < n_; ++j) {
        work[j] = j;
        for (int q = ap[j]; q < ap[j + 1]; ++q) {
            int i = ai[q];
            if (i > j) return false;
            while (work[i] != j) {
                if (etree[i] == -1) etree[i] = j;
                ++lnz[i];
                work[i] = j;
                i = etree[i];
            }
        }
    }
    lp_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) lp_[i + 1] = lp_[i] + lnz[i];
    li_.assign(lp_[n_], 0);
    lx_.assign(lp_[n_], 0.0);
    d_.assign(n_, 0.0);
    dinv_.assign(n_, 0.0);

    std::vector<int> next(lp_.begin(), lp_.end() - 1);
    std::vector<double> y(n_, 0.0);
    std::vector<char> marked(n_, 0);
    std::vector<int> yidx(n_), buf(n_);

    for (int k = 0; k < n_; ++k) {
        int nnzy = 0;
        d_[k] = 0.0;
        for (int q = ap[k]; q < ap[k + 1]; ++q) {
            const int i = ai[q];
            if (i == k) {
                d_[k] = ax[q];
                continue;
            }
            y[i] = ax[q];
            int nx = i;
            if (!marked[nx]) {
                marked[nx] = 1;
                buf[0] = nx;
                int nb = 1;
                nx = etree[i];
                while (nx != -1 && nx < k) {
                    if (marked[nx]) break;
                    marked[nx] = 1;
                    buf[nb++] = nx;
                    nx = etree[nx];
                }
                while (nb) yidx[nnzy++] = buf[--nb];
            }
        }
        for (int t = nnzy - 1; t >= 0; --t) {
            const int c = yidx[t];
            const int tmp = next[c];
            const double yc = y[c];
            for (int q = lp_[c]; q < tmp; ++q) y[li_[q]] -= lx_[q] * yc;
            li_[tmp] = k;
            lx_[tmp] = yc * dinv_[c];
            d_[k] -= yc * lx_[tmp];
            ++next[c];
            y[c] = 0.0;
            marked[c] = 0;
        }
        const double sgn = signs[perm_[k]] > 0 ? 1.0 : -1.0;
        if (sgn * d_[k] <= settings_.pivot_eps) {
            d_[k] = sgn * settings_.pivot_delta;
            ++regularized_;
        }
        if (!std::isfinite(d_[k])) return false;
        dinv_[k] = 1.0 / d_[k];
    }
    return true;
}

void SparseLdl::solve(Eigen::Ref<Eigen::VectorXd> x) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[i] = x[perm_[i]];
    for (int i = 0; i < n_; ++i)
        for (int q = lp_[i]; q < lp_[i + 1]; ++q) y[li_[q]] -= lx_[q] * y[i];
    for (int i = 0; i < n_; ++i) y[i] *= dinv_[i];
    for (int i = n_ - 1; i >= 0; --i)
        for (int q = lp_[i]; q < lp_[i + 1]; ++q) y[i] -= lx_[q] * y[li_[q]];
    for (int i = 0; i < n_; ++i) x[perm_[i]] = y[i];
}

}  // namespace acrelax

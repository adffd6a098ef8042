#include "acrelax/cones.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace acrelax::cones {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest positive root of a*t^2 + 2*b*t + c with c > 0; infinity if none.
double first_positive_root(double a, double b, double c) {
    if (std::abs(a) < 1e-300) {
        return b < 0.0 ? -c / (2.0 * b) : kInf;
    }
    const double disc = b * b - a * c;
    if (disc < 0.0) return kInf;  // no real root: sign of quadratic never changes
    const double sq = std::sqrt(disc);
    // roots r1 = (-b - sq)/a, r2 = (-b + sq)/a computed stably
    const double q = -(b + std::copysign(sq, b));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : kInf;
    double best = kInf;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
    return best;
}

}  // namespace

// --- nonnegative orthant --------------------------------------------------

void Nonnegative::identity(Seg e) const { e.setOnes(); }

double Nonnegative::max_step(ConstSeg x, ConstSeg dx) const {
    double a = kInf;
    for (int i = 0; i < n_; ++i)
        if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    return a;
}

double Nonnegative::min_eigenvalue(ConstSeg x) const { return n_ ? x.minCoeff() : kInf; }

bool Nonnegative::set_scaling(ConstSeg x, ConstSeg s) {
    if ((x.array() <= 0.0).any() || (s.array() <= 0.0).any()) return false;
    w_ = (s.array() / x.array()).sqrt();
    lam_ = (s.array() * x.array()).sqrt();
    h_ = s.array() / x.array();
    return true;
}

void Nonnegative::apply_w(ConstSeg in, Seg out) const { out = w_.cwiseProduct(in); }

void Nonnegative::hessian(Eigen::Ref<Eigen::MatrixXd> out) const { out = h_.asDiagonal(); }

void Nonnegative::product(ConstSeg u, ConstSeg v, Seg out) const { out = u.cwiseProduct(v); }

void Nonnegative::divide_by_lambda(ConstSeg r, Seg out) const { out = r.cwiseQuotient(lam_); }

// --- second-order cone ----------------------------------------------------

void SecondOrder::identity(Seg e) const {
    e.setZero();
    e[0] = 1.0;
}

double SecondOrder::max_step(ConstSeg x, ConstSeg dx) const {
    if (n_ == 1) return dx[0] < 0.0 ? -x[0] / dx[0] : kInf;
    const auto x1 = x.tail(n_ - 1);
    const auto d1 = dx.tail(n_ - 1);
    const double a = dx[0] * dx[0] - d1.squaredNorm();
    const double b = x[0] * dx[0] - x1.dot(d1);
    const double nx = x1.norm();
    const double c = (x[0] - nx) * (x[0] + nx);
    double alpha = first_positive_root(a, b, c);
    if (dx[0] < 0.0) alpha = std::min(alpha, -x[0] / dx[0]);
    return alpha;
}

double SecondOrder::min_eigenvalue(ConstSeg x) const {
    return n_ == 1 ? x[0] : x[0] - x.tail(n_ - 1).norm();
}

bool SecondOrder::set_scaling(ConstSeg x, ConstSeg s) {
    const double nx = n_ > 1 ? x.tail(n_ - 1).norm() : 0.0;
    const double ns = n_ > 1 ? s.tail(n_ - 1).norm() : 0.0;
    const double xdet = (x[0] - nx) * (x[0] + nx);
    const double sdet = (s[0] - ns) * (s[0] + ns);
    if (!(x[0] > nx) || !(s[0] > ns) || !(xdet > 0.0) || !(sdet > 0.0)) return false;

    const Vec xb = x / std::sqrt(xdet);
    const Vec sb = s / std::sqrt(sdet);
    const double gamma = std::sqrt((1.0 + xb.dot(sb)) / 2.0);
    wbar_[0] = (sb[0] + xb[0]) / (2.0 * gamma);
    if (n_ > 1) wbar_.tail(n_ - 1) = (sb.tail(n_ - 1) - xb.tail(n_ - 1)) / (2.0 * gamma);
    eta_ = std::pow(sdet / xdet, 0.25);
    apply_w(x, lam_);
    return true;
}

void SecondOrder::apply_w(ConstSeg in, Seg out) const {
    if (n_ == 1) {
        out[0] = eta_ * wbar_[0] * in[0];
        return;
    }
    const auto w1 = wbar_.tail(n_ - 1);
    const double w1u1 = w1.dot(in.tail(n_ - 1));
    const double head = wbar_[0] * in[0] + w1u1;
    Vec tail = in.tail(n_ - 1) + (in[0] + w1u1 / (1.0 + wbar_[0])) * w1;
    out[0] = eta_ * head;
    out.tail(n_ - 1) = eta_ * tail;
}

void SecondOrder::apply_w_inverse(ConstSeg in, Seg out) const {
    if (n_ == 1) {
        out[0] = in[0] / (eta_ * wbar_[0]);
        return;
    }
    const auto w1 = wbar_.tail(n_ - 1);
    const double w1u1 = w1.dot(in.tail(n_ - 1));
    const double head = wbar_[0] * in[0] - w1u1;
    Vec tail = in.tail(n_ - 1) + (-in[0] + w1u1 / (1.0 + wbar_[0])) * w1;
    out[0] = head / eta_;
    out.tail(n_ - 1) = tail / eta_;
}

void SecondOrder::hessian(Eigen::Ref<Eigen::MatrixXd> out) const {
    // W'W formed from W itself so the KKT matrix agrees with apply_w to rounding
    Eigen::MatrixXd w(n_, n_);
    Vec unit = Vec::Zero(n_);
    for (int j = 0; j < n_; ++j) {
        unit[j] = 1.0;
        Vec col(n_);
        apply_w(unit, col);
        w.col(j) = col;
        unit[j] = 0.0;
    }
    out = w.transpose() * w;
}

void SecondOrder::product(ConstSeg u, ConstSeg v, Seg out) const {
    const double head = u.dot(v);
    if (n_ > 1) out.tail(n_ - 1) = u[0] * v.tail(n_ - 1) + v[0] * u.tail(n_ - 1);
    out[0] = head;
}

void SecondOrder::divide_by_lambda(ConstSeg r, Seg out) const {
    if (n_ == 1) {
        out[0] = r[0] / lam_[0];
        return;
    }
    const auto l1 = lam_.tail(n_ - 1);
    const double nl = l1.norm();
    const double det = (lam_[0] - nl) * (lam_[0] + nl);
    const double w0 = (lam_[0] * r[0] - l1.dot(r.tail(n_ - 1))) / det;
    Vec tail = (r.tail(n_ - 1) - w0 * l1) / lam_[0];
    out[0] = w0;
    out.tail(n_ - 1) = tail;
}

// --- semidefinite cone ----------------------------------------------------

Semidefinite::Semidefinite(int side)
    : k_(side), r_(Eigen::MatrixXd::Identity(side, side)), rinv_(r_), lam_(Vec::Ones(side)) {}

void Semidefinite::identity(Seg e) const { e = svec(Eigen::MatrixXd::Identity(k_, k_)); }

double Semidefinite::max_step(ConstSeg x, ConstSeg dx) const {
    const Eigen::MatrixXd X = smat(x);
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd M = llt.matrixL().solve(smat(dx));
    M = llt.matrixL().solve(M.transpose()).transpose();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double Semidefinite::min_eigenvalue(ConstSeg x) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(x), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

bool Semidefinite::set_scaling(ConstSeg x, ConstSeg s) {
    Eigen::LLT<Eigen::MatrixXd> lx(smat(x)), ls(smat(s));
    if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
    const Eigen::MatrixXd Lx = lx.matrixL();
    const Eigen::MatrixXd Ls = ls.matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ls.transpose() * Lx,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    if ((sv.array() <= 0.0).any()) return false;
    r_ = Lx * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
    rinv_ = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
            Lx.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(k_, k_));
    lam_ = sv;
    return true;
}

void Semidefinite::lambda(Seg out) const {
    out.setZero();
    for (int i = 0; i < k_; ++i) out[svec_index(k_, i, i)] = lam_[i];
}

void Semidefinite::apply_w(ConstSeg in, Seg out) const {
    out = svec(rinv_ * smat(in) * rinv_.transpose());
}

void Semidefinite::apply_wt(ConstSeg in, Seg out) const {
    out = svec(rinv_.transpose() * smat(in) * rinv_);
}

void Semidefinite::apply_w_inverse(ConstSeg in, Seg out) const {
    out = svec(r_ * smat(in) * r_.transpose());
}

void Semidefinite::hessian(Eigen::Ref<Eigen::MatrixXd> out) const {
    // W'W column by column, consistent with apply_w
    const int d = dim();
    Eigen::MatrixXd w(d, d);
    Vec unit = Vec::Zero(d), col(d);
    for (int j = 0; j < d; ++j) {
        unit[j] = 1.0;
        apply_w(unit, col);
        w.col(j) = col;
        unit[j] = 0.0;
    }
    out = w.transpose() * w;
}

void Semidefinite::product(ConstSeg u, ConstSeg v, Seg out) const {
    const Eigen::MatrixXd U = smat(u), V = smat(v);
    out = svec(0.5 * (U * V + V * U));
}

void Semidefinite::divide_by_lambda(ConstSeg r, Seg out) const {
    Eigen::MatrixXd R = smat(r);
    for (int j = 0; j < k_; ++j)
        for (int i = 0; i < k_; ++i) R(i, j) *= 2.0 / (lam_[i] + lam_[j]);
    out = svec(R);
}

// --- product cone ----------------------------------------------------------

void Product::add(std::unique_ptr<Block> b) {
    starts.push_back(dim);
    dim += b->dim();
    degree += b->degree();
    blocks.push_back(std::move(b));
}

void Product::identity(Seg e) const {
    for (std::size_t k = 0; k < blocks.size(); ++k)
        blocks[k]->identity(e.segment(starts[k], blocks[k]->dim()));
}

double Product::max_step(ConstSeg x, ConstSeg dx) const {
    double a = kInf;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int s = starts[k], d = blocks[k]->dim();
        a = std::min(a, blocks[k]->max_step(x.segment(s, d), dx.segment(s, d)));
    }
    return a;
}

double Product::min_eigenvalue(ConstSeg x) const {
    double m = kInf;
    for (std::size_t k = 0; k < blocks.size(); ++k)
        m = std::min(m, blocks[k]->min_eigenvalue(x.segment(starts[k], blocks[k]->dim())));
    return m;
}

bool Product::set_scaling(ConstSeg x, ConstSeg s) {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int st = starts[k], d = blocks[k]->dim();
        if (!blocks[k]->set_scaling(x.segment(st, d), s.segment(st, d))) return false;
    }
    return true;
}

void Product::lambda(Seg out) const {
    for (std::size_t k = 0; k < blocks.size(); ++k)
        blocks[k]->lambda(out.segment(starts[k], blocks[k]->dim()));
}

void Product::apply_w(ConstSeg in, Seg out) const {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int s = starts[k], d = blocks[k]->dim();
        blocks[k]->apply_w(in.segment(s, d), out.segment(s, d));
    }
}

void Product::apply_wt(ConstSeg in, Seg out) const {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int s = starts[k], d = blocks[k]->dim();
        blocks[k]->apply_wt(in.segment(s, d), out.segment(s, d));
    }
}

void Product::product(ConstSeg u, ConstSeg v, Seg out) const {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int s = starts[k], d = blocks[k]->dim();
        blocks[k]->product(u.segment(s, d), v.segment(s, d), out.segment(s, d));
    }
}

void Product::divide_by_lambda(ConstSeg r, Seg out) const {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int s = starts[k], d = blocks[k]->dim();
        blocks[k]->divide_by_lambda(r.segment(s, d), out.segment(s, d));
    }
}

}  // namespace acrelax::cones

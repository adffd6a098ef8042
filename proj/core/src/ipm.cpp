#include "acrelax/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "acrelax/cones.hpp"
#include "acrelax/sparse_ldl.hpp"

namespace acrelax {

const char* to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::primal_infeasible: return "infeasible";
        case SolveStatus::dual_infeasible: return "unbounded";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

void IpmSettings::validate() const {
    if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
    if (!(feasibility_tol > 0.0) || !(gap_tol > 0.0) || !(infeasibility_tol > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (!(step_fraction > 0.0 && step_fraction < 1.0))
        throw std::invalid_argument("step fraction must lie in (0, 1)");
}

namespace {

using Vec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// presolve: drop zero rows and duplicate rows (up to scaling), checking b

struct Presolved {
    SparseMatrix A;
    Vec b;
    std::vector<int> kept;  // kept[new_row] = original row
};

Presolved presolve(const ConicProgram& prog) {
    const int m = prog.num_rows();
    using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
    RowMajor ar = prog.A;
    ar.prune(0.0);

    Presolved out;
    std::map<std::vector<std::pair<int, double>>, std::pair<int, double>> seen;
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> row;
        for (RowMajor::InnerIterator it(ar, i); it; ++it) row.emplace_back(it.col(), it.value());
        if (row.empty()) {
            if (std::abs(prog.b[i]) > 1e-12 * (1.0 + prog.b.cwiseAbs().maxCoeff()))
                throw InconsistentEqualities("zero row " + std::to_string(i) + " with nonzero right-hand side");
            continue;
        }
        const double lead = row.front().second;
        for (auto& e : row) e.second /= lead;
        const double rhs = prog.b[i] / lead;
        auto [it, fresh] = seen.emplace(std::move(row), std::make_pair(i, rhs));
        if (!fresh) {
            const double other = it->second.second;
            if (std::abs(other - rhs) > 1e-9 * (1.0 + std::abs(rhs)))
                throw InconsistentEqualities("duplicate rows " + std::to_string(it->second.first) + " and " +
                                             std::to_string(i) + " disagree");
            continue;
        }
        out.kept.push_back(i);
    }

    std::vector<Triplet> trips;
    for (int r = 0; r < static_cast<int>(out.kept.size()); ++r)
        for (RowMajor::InnerIterator it(ar, out.kept[r]); it; ++it)
            trips.emplace_back(r, it.col(), it.value());
    out.A.resize(static_cast<int>(out.kept.size()), prog.num_vars());
    out.A.setFromTriplets(trips.begin(), trips.end());
    out.b.resize(static_cast<int>(out.kept.size()));
    for (int r = 0; r < static_cast<int>(out.kept.size()); ++r) out.b[r] = prog.b[out.kept[r]];
    return out;
}

// ---------------------------------------------------------------------------
// rotated cones -> second-order cones: x_rot = T x_soc with
// (x0, x1) = (u + v, u - v) on the leading pair of every rotated block

SparseMatrix rotation_map(const ConicProgram& prog) {
    const int n = prog.num_vars();
    std::vector<Triplet> t;
    t.reserve(n + 2 * prog.cones.size());
    std::vector<char> rotated(n, 0);
    for (const Cone& k : prog.cones) {
        if (k.kind != ConeKind::rotated_second_order) continue;
        const int a = k.start, b = k.start + 1;
        rotated[a] = rotated[b] = 1;
        t.emplace_back(a, a, 1.0);
        t.emplace_back(a, b, 1.0);
        t.emplace_back(b, a, 1.0);
        t.emplace_back(b, b, -1.0);
    }
    for (int j = 0; j < n; ++j)
        if (!rotated[j]) t.emplace_back(j, j, 1.0);
    SparseMatrix T(n, n);
    T.setFromTriplets(t.begin(), t.end());
    return T;
}

cones::Product make_product(const ConicProgram& prog) {
    cones::Product p;
    for (const Cone& k : prog.cones) {
        switch (k.kind) {
            case ConeKind::nonnegative: p.add(std::make_unique<cones::Nonnegative>(k.dim)); break;
            case ConeKind::second_order:
            case ConeKind::rotated_second_order:
                p.add(std::make_unique<cones::SecondOrder>(k.dim));
                break;
            case ConeKind::psd: p.add(std::make_unique<cones::Semidefinite>(k.side())); break;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Ruiz equilibration; column scaling is constant on every non-orthant block

struct Scaling {
    Vec row;  // D
    Vec col;  // E
    double rhs = 1.0;   // b scaled by this after D
    double cost = 1.0;  // c scaled by this after E
};

Scaling equilibrate(SparseMatrix& A, const ConicProgram& prog, int passes) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    Scaling sc{Vec::Ones(m), Vec::Ones(n)};
    for (int pass = 0; pass < passes; ++pass) {
        Vec rmax = Vec::Zero(m), cmax = Vec::Zero(n);
        for (int j = 0; j < n; ++j)
            for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
                const double v = std::abs(it.value());
                rmax[it.row()] = std::max(rmax[it.row()], v);
                cmax[j] = std::max(cmax[j], v);
            }
        Vec dr(m), dc(n);
        for (int i = 0; i < m; ++i) dr[i] = rmax[i] > 0.0 ? 1.0 / std::sqrt(rmax[i]) : 1.0;
        for (const Cone& k : prog.cones) {
            if (k.kind == ConeKind::nonnegative) {
                for (int j = k.start; j < k.end(); ++j)
                    dc[j] = cmax[j] > 0.0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
            } else {
                const double mx = cmax.segment(k.start, k.dim).maxCoeff();
                dc.segment(k.start, k.dim).setConstant(mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0);
            }
        }
        dr = dr.cwiseMax(1e-4).cwiseMin(1e4);
        dc = dc.cwiseMax(1e-4).cwiseMin(1e4);
        A = dr.asDiagonal() * A * dc.asDiagonal();
        sc.row = sc.row.cwiseProduct(dr);
        sc.col = sc.col.cwiseProduct(dc);
    }
    return sc;
}

// ---------------------------------------------------------------------------

constexpr double kSwitchOrderResidual = 1e-6;

// Infinity-norm residuals scaled by the data and the iterate itself.
double primal_residual(const ConicProgram& p, const Vec& x) {
    const double scale = std::max(1.0, p.b.lpNorm<Eigen::Infinity>() + x.lpNorm<Eigen::Infinity>());
    return (p.A * x - p.b).lpNorm<Eigen::Infinity>() / scale;
}

double dual_residual(const ConicProgram& p, const Vec& y, const Vec& s) {
    const double scale = std::max(1.0, p.c.lpNorm<Eigen::Infinity>() + y.lpNorm<Eigen::Infinity>() +
                                           s.lpNorm<Eigen::Infinity>());
    return (p.A.transpose() * y + s - p.c).lpNorm<Eigen::Infinity>() / scale;
}

class Solver {
public:
    Solver(const ConicProgram& prog, const IpmSettings& st, const IpmObserver& obs, std::ostream* log)
        : orig_(prog), st_(st), obs_(obs), log_(log) {}

    IpmResult run();

private:
    void build_kkt();
    bool factor_kkt(int order);
    void apply_kkt(const Vec& zx, const Vec& zy, Vec& ox, Vec& oy) const;
    double solve_kkt(const Vec& rx, const Vec& ry, Vec& dx, Vec& dy);  // relative residual
    void apply_hessian(const Vec& v, Vec& out) const;

    struct Direction {
        Vec dx, dy, ds;
        double dtau = 0.0, dkappa = 0.0;
    };
    void direction(const Vec& rc, double rkappa, double eta, Direction& d);
    double max_step(const Direction& d) const;

    void to_original(const Vec& x, const Vec& y, const Vec& s, Vec& xo, Vec& yo, Vec& so) const;
    void measure(IpmIterate& it) const;

    const ConicProgram& orig_;
    const IpmSettings& st_;
    const IpmObserver& obs_;
    std::ostream* log_;

    // transformed problem
    SparseMatrix A_, At_;
    Vec b_, c_;
    std::vector<int> kept_;
    SparseMatrix T_;
    Scaling scale_;
    cones::Product K_;
    int n_ = 0, m_ = 0;

    // iterate
    Vec x_, y_, s_;
    double tau_ = 1.0, kappa_ = 1.0;
    Vec rp_, rd_;
    double rg_ = 0.0;
    Vec lam_;

    // kkt
    std::vector<Eigen::MatrixXd> hblocks_;
    std::vector<Vec> hdiag_;
    std::vector<Triplet> at_trips_;
    SparseMatrix kkt_;
    std::vector<std::int8_t> signs_;
    // two elimination orders: AMD over the whole KKT matrix, or primal block
    // first (normal-equation style); the solver switches when one solves poorly
    SparseLdl ldl_[2];
    int order_ = 0;
    Vec dx1_, dy1_;
};

void Solver::apply_hessian(const Vec& v, Vec& out) const {
    out.resize(n_);
    for (std::size_t k = 0; k < K_.blocks.size(); ++k) {
        const int s = K_.starts[k], d = K_.blocks[k]->dim();
        if (K_.blocks[k]->diagonal_hessian())
            out.segment(s, d) = hdiag_[k].cwiseProduct(v.segment(s, d));
        else
            out.segment(s, d) = hblocks_[k] * v.segment(s, d);
    }
}

void Solver::build_kkt() {
    std::vector<Triplet> t = at_trips_;
    const double reg = st_.static_regularization;
    hblocks_.resize(K_.blocks.size());
    hdiag_.resize(K_.blocks.size());
    for (std::size_t k = 0; k < K_.blocks.size(); ++k) {
        const auto& blk = *K_.blocks[k];
        const int s = K_.starts[k], d = blk.dim();
        if (blk.diagonal_hessian()) {
            hdiag_[k] = static_cast<const cones::Nonnegative&>(blk).hessian_diagonal();
            for (int i = 0; i < d; ++i) t.emplace_back(s + i, s + i, -hdiag_[k][i] - reg);
        } else {
            hblocks_[k].resize(d, d);
            blk.hessian(hblocks_[k]);
            for (int j = 0; j < d; ++j)
                for (int i = 0; i <= j; ++i)
                    t.emplace_back(s + i, s + j, -hblocks_[k](i, j) - (i == j ? reg : 0.0));
        }
    }
    for (int i = 0; i < m_; ++i) t.emplace_back(n_ + i, n_ + i, reg);
    kkt_.resize(n_ + m_, n_ + m_);
    kkt_.setFromTriplets(t.begin(), t.end());
}

bool Solver::factor_kkt(int order) {
    return ldl_[order].factor(kkt_, signs_, order == 0 ? 0 : n_);
}

void Solver::apply_kkt(const Vec& zx, const Vec& zy, Vec& ox, Vec& oy) const {
    Vec hz;
    apply_hessian(zx, hz);
    ox = -hz + At_ * zy;
    oy = A_ * zx;
}

double Solver::solve_kkt(const Vec& rx, const Vec& ry, Vec& dx, Vec& dy) {
    const SparseLdl& ldl = ldl_[order_];
    Vec rhs(n_ + m_);
    rhs << rx, ry;
    Vec z = rhs;
    ldl.solve(z);
    Vec ox, oy, e(n_ + m_);
    auto residual = [&](const Vec& sol) {
        apply_kkt(sol.head(n_), sol.tail(m_), ox, oy);
        e << rx - ox, ry - oy;
        return e.lpNorm<Eigen::Infinity>();
    };
    const double target = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    double best = residual(z);
    for (int k = 0; k < st_.refinement_steps && best > target; ++k) {
        ldl.solve(e);
        Vec trial = z + e;
        const double r = residual(trial);
        if (!(r < best)) break;
        z = std::move(trial);
        best = r;
    }
    dx = z.head(n_);
    dy = z.tail(m_);
    return best / (1.0 + rhs.lpNorm<Eigen::Infinity>());
}

void Solver::direction(const Vec& rc, double rkappa, double eta, Direction& d) {
    Vec ds_l(n_), wtd(n_);
    K_.divide_by_lambda(rc, ds_l);
    K_.apply_wt(ds_l, wtd);
    Vec dx2, dy2;
    solve_kkt(-eta * rd_ - wtd, -eta * rp_, dx2, dy2);
    const double num = -eta * rg_ - rkappa / tau_ - c_.dot(dx2) + b_.dot(dy2);
    const double den = c_.dot(dx1_) - b_.dot(dy1_) - kappa_ / tau_;
    d.dtau = num / den;
    d.dx = dx2 + d.dtau * dx1_;
    d.dy = dy2 + d.dtau * dy1_;
    // ds = W'(lambda \ rc - W dx), cancelling at the scale of lambda rather than H
    Vec wdx(n_);
    K_.apply_w(d.dx, wdx);
    d.ds.resize(n_);
    K_.apply_wt(ds_l - wdx, d.ds);
    d.dkappa = (rkappa - kappa_ * d.dtau) / tau_;
}

double Solver::max_step(const Direction& d) const {
    double a = std::min(K_.max_step(x_, d.dx), K_.max_step(s_, d.ds));
    if (d.dtau < 0.0) a = std::min(a, -tau_ / d.dtau);
    if (d.dkappa < 0.0) a = std::min(a, -kappa_ / d.dkappa);
    return a;
}

void Solver::to_original(const Vec& x, const Vec& y, const Vec& s, Vec& xo, Vec& yo, Vec& so) const {
    const Vec x1 = scale_.col.cwiseProduct(x) / scale_.rhs;
    xo = T_ * x1;
    const Vec s1 = s.cwiseQuotient(scale_.col) / scale_.cost;
    // s_rot = T^{-T} s_soc, and T^{-T} = T / 2 on rotated pairs
    so = s1;
    for (const Cone& k : orig_.cones) {
        if (k.kind != ConeKind::rotated_second_order) continue;
        const double u = s1[k.start], v = s1[k.start + 1];
        so[k.start] = 0.5 * (u + v);
        so[k.start + 1] = 0.5 * (u - v);
    }
    yo = Vec::Zero(orig_.num_rows());
    const Vec y1 = scale_.row.cwiseProduct(y) / scale_.cost;
    for (int r = 0; r < m_; ++r) yo[kept_[r]] = y1[r];
}

void Solver::measure(IpmIterate& it) const {
    it.tau = tau_;
    it.kappa = kappa_;
    it.x_margin = K_.min_eigenvalue(x_);
    it.s_margin = K_.min_eigenvalue(s_);
}

IpmResult Solver::run() {
    orig_.validate();
    st_.validate();

    Presolved pre = presolve(orig_);
    kept_ = std::move(pre.kept);
    T_ = rotation_map(orig_);
    A_ = pre.A * T_;
    c_ = T_.transpose() * orig_.c;
    scale_ = equilibrate(A_, orig_, 12);
    b_ = scale_.row.cwiseProduct(pre.b);
    c_ = scale_.col.cwiseProduct(c_);
    scale_.rhs = 1.0 / std::max(1.0, b_.lpNorm<Eigen::Infinity>());
    scale_.cost = 1.0 / std::max(1.0, c_.lpNorm<Eigen::Infinity>());
    b_ *= scale_.rhs;
    c_ *= scale_.cost;
    At_ = A_.transpose();
    n_ = static_cast<int>(A_.cols());
    m_ = static_cast<int>(A_.rows());
    K_ = make_product(orig_);

    at_trips_.clear();
    for (int j = 0; j < A_.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A_, j); it; ++it)
            at_trips_.emplace_back(static_cast<int>(it.col()), n_ + static_cast<int>(it.row()), it.value());
    signs_.assign(n_ + m_, 1);
    std::fill(signs_.begin(), signs_.begin() + n_, std::int8_t{-1});

    x_ = Vec(n_);
    s_ = Vec(n_);
    K_.identity(x_);
    K_.identity(s_);
    y_ = Vec::Zero(m_);
    tau_ = kappa_ = 1.0;
    lam_ = Vec(n_);

    const double nu = static_cast<double>(K_.degree);
    const Vec e = [&] {
        Vec v(n_);
        K_.identity(v);
        return v;
    }();

    IpmResult res;
    res.status = SolveStatus::numerical_failure;
    Direction aff, cor;
    double last_step = 0.0;

    if (log_) {
        *log_ << "iter      pobj            dobj           pres      dres      gap       mu        step\n";
    }

    for (int iter = 0; iter <= st_.max_iterations; ++iter) {
        rp_ = A_ * x_ - b_ * tau_;
        rd_ = At_ * y_ + s_ - c_ * tau_;
        rg_ = c_.dot(x_) - b_.dot(y_) + kappa_;
        const double mu = (x_.dot(s_) + tau_ * kappa_) / (nu + 1.0);

        // measure in original coordinates
        Vec xo, yo, so;
        to_original(x_ / tau_, y_ / tau_, s_ / tau_, xo, yo, so);
        const double pobj = orig_.c.dot(xo);
        const double dobj = orig_.b.dot(yo);
        const double pres = primal_residual(orig_, xo);
        const double dres = dual_residual(orig_, yo, so);
        const double abs_gap = std::abs(pobj - dobj);
        const double off = orig_.objective_offset;
        const double relgap = abs_gap / std::max(1.0, std::min(std::abs(pobj + off), std::abs(dobj + off)));

        res.iterations = iter;
        if (log_) {
            *log_ << std::setw(4) << iter << std::scientific << std::setprecision(7) << std::setw(16)
                  << pobj + orig_.objective_offset << std::setw(16) << dobj + orig_.objective_offset
                  << std::setprecision(2) << std::setw(10) << pres << std::setw(10) << dres
                  << std::setw(10) << relgap << std::setw(10) << mu << std::setw(10) << last_step
                  << std::defaultfloat << "\n";
        }
        if (obs_) {
            IpmIterate it;
            it.iteration = iter;
            it.x = &xo;
            it.y = &yo;
            it.s = &so;
            it.primal_objective = pobj + orig_.objective_offset;
            it.dual_objective = dobj + orig_.objective_offset;
            it.primal_residual = pres;
            it.dual_residual = dres;
            it.mu = mu;
            it.step = last_step;
            measure(it);
            obs_(it);
        }

        if (pres <= st_.feasibility_tol && dres <= st_.feasibility_tol && relgap <= st_.gap_tol) {
            res.status = SolveStatus::optimal;
            res.x = xo;
            res.y = yo;
            res.s = so;
            res.primal_objective = pobj + orig_.objective_offset;
            res.dual_objective = dobj + orig_.objective_offset;
            res.primal_residual = pres;
            res.dual_residual = dres;
            res.gap = relgap;
            return res;
        }

        if (tau_ < kappa_) {
            Vec xr, yr, sr;
            to_original(x_, y_, s_, xr, yr, sr);
            const double by = orig_.b.dot(yr);
            if (by > 0.0) {
                // certificate normalized to b'y = 1, residual relative to its size
                const double pinf = (orig_.A.transpose() * yr + sr).norm() / by / std::max(1.0, yr.norm() / by);
                if (pinf <= st_.infeasibility_tol) {
                    res.status = SolveStatus::primal_infeasible;
                    res.y = yr / by;
                    res.s = sr / by;
                    res.x = Vec::Zero(orig_.num_vars());
                    res.primal_residual = pinf;
                    return res;
                }
            }
            const double cx = orig_.c.dot(xr);
            if (cx < 0.0) {
                const double dinf = (orig_.A * xr).norm() / -cx / std::max(1.0, xr.norm() / -cx);
                if (dinf <= st_.infeasibility_tol) {
                    res.status = SolveStatus::dual_infeasible;
                    res.x = xr / -cx;
                    res.y = Vec::Zero(orig_.num_rows());
                    res.s = Vec::Zero(orig_.num_vars());
                    res.dual_residual = dinf;
                    return res;
                }
            }
        }
        if (iter == st_.max_iterations) break;

        if (!K_.set_scaling(x_, s_)) break;
        K_.lambda(lam_);
        build_kkt();
        order_ = 0;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (const double r0 = factor_kkt(0) ? solve_kkt(c_, b_, dx1_, dy1_) : nan; !(r0 <= kSwitchOrderResidual)) {
            Vec dx = dx1_, dy = dy1_;
            order_ = 1;
            const double r1 = factor_kkt(1) ? solve_kkt(c_, b_, dx1_, dy1_) : nan;
            if (std::isnan(r0) && std::isnan(r1)) break;
            if (!(r1 < r0 || std::isnan(r0))) {
                order_ = 0;
                dx1_ = std::move(dx);
                dy1_ = std::move(dy);
            }
        }

        // predictor
        Vec ll(n_);
        K_.product(lam_, lam_, ll);
        direction(-ll, -tau_ * kappa_, 1.0, aff);
        const double a_aff = std::min(1.0, max_step(aff));
        const double sigma = std::clamp(std::pow(1.0 - a_aff, 3), 0.0, 1.0);

        // corrector
        Vec wdx(n_), wds(n_), corr(n_);
        K_.apply_w(aff.dx, wdx);
        wds = -lam_ - wdx;
        K_.product(wdx, wds, corr);
        const Vec rc = -ll - corr + sigma * mu * e;
        const double rk = -tau_ * kappa_ - aff.dtau * aff.dkappa + sigma * mu;
        direction(rc, rk, 1.0 - sigma, cor);

        double amax = max_step(cor);
        if (amax < 0.1) {
            // blocked near the boundary: retry with a strongly centered direction
            Direction cen;
            const double sc = std::max(sigma, 0.5);
            direction(-ll + sc * mu * e, -tau_ * kappa_ + sc * mu, 1.0 - sc, cen);
            const double acen = max_step(cen);
            if (cen.dx.allFinite() && cen.ds.allFinite() && acen > amax) {
                cor = std::move(cen);
                amax = acen;
            }
        }
        const double alpha = std::min(1.0, st_.step_fraction * amax);
        if (!std::isfinite(alpha) || alpha < 1e-12 || !cor.dx.allFinite() || !cor.ds.allFinite()) break;

        x_ += alpha * cor.dx;
        y_ += alpha * cor.dy;
        s_ += alpha * cor.ds;
        tau_ += alpha * cor.dtau;
        kappa_ += alpha * cor.dkappa;
        last_step = alpha;
    }

    Vec xo, yo, so;
    to_original(x_ / tau_, y_ / tau_, s_ / tau_, xo, yo, so);
    res.x = xo;
    res.y = yo;
    res.s = so;
    res.primal_objective = orig_.c.dot(xo) + orig_.objective_offset;
    res.dual_objective = orig_.b.dot(yo) + orig_.objective_offset;
    res.primal_residual = primal_residual(orig_, xo);
    res.dual_residual = dual_residual(orig_, yo, so);
    return res;
}

// ---------------------------------------------------------------------------

double rotated_margin(const Eigen::Ref<const Vec>& x) {
    // x0 x1 >= ||w||^2  <=>  (u, v, w) in SOC with u = (x0+x1)/2, v = (x0-x1)/2
    const double u = 0.5 * (x[0] + x[1]), v = 0.5 * (x[0] - x[1]);
    const double w = x.size() > 2 ? x.tail(x.size() - 2).norm() : 0.0;
    return u - std::hypot(v, w);
}

double rotated_dual_margin(const Eigen::Ref<const Vec>& s) {
    // s0 s1 >= ||w||^2 / 4  <=>  (s0 + s1, s0 - s1, w) in SOC
    const double w = s.size() > 2 ? s.tail(s.size() - 2).norm() : 0.0;
    return 0.5 * ((s[0] + s[1]) - std::hypot(s[0] - s[1], w));
}

double cone_margin(const Cone& k, const Eigen::Ref<const Vec>& v, bool dual) {
    switch (k.kind) {
        case ConeKind::nonnegative: return v.minCoeff();
        case ConeKind::second_order: return v[0] - (k.dim > 1 ? v.tail(k.dim - 1).norm() : 0.0);
        case ConeKind::rotated_second_order: return dual ? rotated_dual_margin(v) : rotated_margin(v);
        case ConeKind::psd: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(v), Eigen::EigenvaluesOnly);
            return es.eigenvalues()[0];
        }
    }
    return 0.0;
}

}  // namespace

IpmResult solve(const ConicProgram& prog, const IpmSettings& settings, const IpmObserver& observer,
                std::ostream* log) {
    Solver solver(prog, settings, observer, log);
    return solver.run();
}

KktResiduals kkt_residuals(const ConicProgram& prog, const IpmResult& result) {
    KktResiduals r;
    r.primal = (prog.A * result.x - prog.b).norm();
    r.dual = (prog.A.transpose() * result.y + result.s - prog.c).norm();
    r.gap = std::abs(result.x.dot(result.s));
    return r;
}

bool in_cone(const ConicProgram& prog, const Eigen::VectorXd& x, double tol) {
    for (const Cone& k : prog.cones)
        if (cone_margin(k, x.segment(k.start, k.dim), false) < -tol) return false;
    return true;
}

bool in_dual_cone(const ConicProgram& prog, const Eigen::VectorXd& s, double tol) {
    for (const Cone& k : prog.cones)
        if (cone_margin(k, s.segment(k.start, k.dim), true) < -tol) return false;
    return true;
}

bool verify_primal_infeasibility(const ConicProgram& prog, const Eigen::VectorXd& y, double tol) {
    if (y.size() != prog.num_rows()) return false;
    const double by = prog.b.dot(y);
    if (!(by > 0.0)) return false;
    const Eigen::VectorXd s = -(prog.A.transpose() * y) / by;
    return in_dual_cone(prog, s, tol);
}

bool verify_dual_infeasibility(const ConicProgram& prog, const Eigen::VectorXd& x, double tol) {
    if (x.size() != prog.num_vars()) return false;
    const double cx = prog.c.dot(x);
    if (!(cx < 0.0)) return false;
    const Eigen::VectorXd xn = x / -cx;
    return (prog.A * xn).norm() <= tol * (1.0 + xn.norm()) && in_cone(prog, xn, tol);
}

}  // namespace acrelax

#include "acrelax/acnl.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acrelax/graphkit.hpp"

namespace acrelax {

const char* to_string(NlStatus s) noexcept {
    return s == NlStatus::local_optimal ? "local_optimal" : "infeasible_or_stalled";
}

VoltageProfile flat_profile(const Network& net) {
    return {std::vector<double>(net.num_buses(), 1.0), std::vector<double>(net.num_buses(), 0.0)};
}

namespace {

// alpha c_aa + beta c_bb + gamma c_ab + delta s_ab over u = (e_a, f_a, e_b, f_b)
Eigen::Matrix4d lifted_quad(double alpha, double beta, double gamma, double delta) {
    Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
    q(0, 0) = q(1, 1) = alpha;
    q(2, 2) = q(3, 3) = beta;
    q(0, 2) = q(2, 0) = q(1, 3) = q(3, 1) = 0.5 * gamma;
    q(0, 3) = q(3, 0) = 0.5 * delta;
    q(1, 2) = q(2, 1) = -0.5 * delta;
    return q;
}

}  // namespace

double AcProblem::Quad::eval(const Eigen::VectorXd& z, int nb) const {
    const Eigen::Vector4d u(z[a], z[nb + a], z[b], z[nb + b]);
    return u.dot(q * u);
}

Eigen::Vector4d AcProblem::Quad::grad(const Eigen::VectorXd& z, int nb) const {
    const Eigen::Vector4d u(z[a], z[nb + a], z[b], z[nb + b]);
    return 2.0 * q * u;
}

AcProblem::AcProblem(const Network& net)
    : net_(net),
      nb_(static_cast<int>(net.num_buses())),
      ng_(static_cast<int>(net.num_generators())),
      nv_(2 * nb_ + 2 * ng_) {
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        const int f = static_cast<int>(net.from_index(k)), t = static_cast<int>(net.to_index(k));
        const BranchCoeffs& y = net.coeffs()[k];
        p_quads_.push_back({f, t, lifted_quad(y.g_ff, 0.0, y.g_ft, -y.b_ft)});
        q_quads_.push_back({f, t, lifted_quad(-y.b_ff, 0.0, -y.b_ft, -y.g_ft)});
        quad_bus_.push_back(f);
        p_quads_.push_back({f, t, lifted_quad(0.0, y.g_tt, y.g_tf, y.b_tf)});
        q_quads_.push_back({f, t, lifted_quad(0.0, -y.b_tt, -y.b_tf, y.g_tf)});
        quad_bus_.push_back(t);
    }

    for (int i = 0; i < nb_; ++i) {
        const Bus& bus = net.buses()[i];
        ineq_.push_back({IneqKind::vmin, i, bus.v_min * bus.v_min});
        ineq_.push_back({IneqKind::vmax, i, bus.v_max * bus.v_max});
    }
    for (int g = 0; g < ng_; ++g) {
        const Generator& gen = net.generators()[g];
        if (std::isfinite(gen.p_min)) ineq_.push_back({IneqKind::pmin, g, gen.p_min});
        if (std::isfinite(gen.p_max)) ineq_.push_back({IneqKind::pmax, g, gen.p_max});
        if (std::isfinite(gen.q_min)) ineq_.push_back({IneqKind::qmin, g, gen.q_min});
        if (std::isfinite(gen.q_max)) ineq_.push_back({IneqKind::qmax, g, gen.q_max});
    }
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        if (!net.branches()[k].rated()) continue;
        const double s2 = net.branches()[k].s_max * net.branches()[k].s_max;
        ineq_.push_back({IneqKind::flow, static_cast<int>(2 * k), s2});
        ineq_.push_back({IneqKind::flow, static_cast<int>(2 * k + 1), s2});
    }
}

Eigen::VectorXd AcProblem::pack(const VoltageProfile& v, const std::vector<double>& pg,
                                const std::vector<double>& qg) const {
    if (static_cast<int>(v.e.size()) != nb_ || static_cast<int>(v.f.size()) != nb_ ||
        static_cast<int>(pg.size()) != ng_ || static_cast<int>(qg.size()) != ng_)
        throw std::invalid_argument("profile or dispatch size does not match the network");
    Eigen::VectorXd z(nv_);
    for (int i = 0; i < nb_; ++i) {
        z[i] = v.e[i];
        z[nb_ + i] = v.f[i];
    }
    for (int g = 0; g < ng_; ++g) {
        z[2 * nb_ + g] = pg[g];
        z[2 * nb_ + ng_ + g] = qg[g];
    }
    return z;
}

VoltageProfile AcProblem::voltage(const Eigen::VectorXd& z) const {
    VoltageProfile v;
    v.e.assign(z.data(), z.data() + nb_);
    v.f.assign(z.data() + nb_, z.data() + 2 * nb_);
    return v;
}

std::vector<double> AcProblem::p_gen(const Eigen::VectorXd& z) const {
    return {z.data() + 2 * nb_, z.data() + 2 * nb_ + ng_};
}

std::vector<double> AcProblem::q_gen(const Eigen::VectorXd& z) const {
    return {z.data() + 2 * nb_ + ng_, z.data() + 2 * nb_ + 2 * ng_};
}

double AcProblem::objective(const Eigen::VectorXd& z) const {
    double sum = 0.0;
    for (int g = 0; g < ng_; ++g) sum += net_.generators()[g].cost(z[2 * nb_ + g]);
    return sum;
}

Eigen::VectorXd AcProblem::objective_gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv_);
    for (int g = 0; g < ng_; ++g) {
        const Generator& gen = net_.generators()[g];
        grad[2 * nb_ + g] = 2.0 * gen.cost_c2 * z[2 * nb_ + g] + gen.cost_c1;
    }
    return grad;
}

Eigen::VectorXd AcProblem::eq(const Eigen::VectorXd& z) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_eq());
    for (int i = 0; i < nb_; ++i) {
        const Bus& bus = net_.buses()[i];
        const double vsq = z[i] * z[i] + z[nb_ + i] * z[nb_ + i];
        g[i] = bus.p_demand + bus.gs_shunt * vsq;
        g[nb_ + i] = bus.q_demand - bus.bs_shunt * vsq;
    }
    for (std::size_t k = 0; k < p_quads_.size(); ++k) {
        g[quad_bus_[k]] += p_quads_[k].eval(z, nb_);
        g[nb_ + quad_bus_[k]] += q_quads_[k].eval(z, nb_);
    }
    for (int gi = 0; gi < ng_; ++gi) {
        const int bus = static_cast<int>(net_.bus_index(net_.generators()[gi].bus));
        g[bus] -= z[2 * nb_ + gi];
        g[nb_ + bus] -= z[2 * nb_ + ng_ + gi];
    }
    g[2 * nb_] = z[nb_ + static_cast<int>(net_.slack_index())];
    return g;
}

void AcProblem::scatter_grad(const Quad& q, const Eigen::Vector4d& g, double w,
                             Eigen::Ref<Eigen::VectorXd> row) const {
    const int idx[4] = {q.a, nb_ + q.a, q.b, nb_ + q.b};
    for (int r = 0; r < 4; ++r) row[idx[r]] += w * g[r];
}

void AcProblem::scatter_hess(const Quad& q, const Eigen::Matrix4d& h, double w, Eigen::MatrixXd& out) const {
    const int idx[4] = {q.a, nb_ + q.a, q.b, nb_ + q.b};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(idx[r], idx[c]) += w * h(r, c);
}

Eigen::MatrixXd AcProblem::eq_jacobian(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd jt = Eigen::MatrixXd::Zero(nv_, num_eq());  // transposed for column scatter
    for (int i = 0; i < nb_; ++i) {
        const Bus& bus = net_.buses()[i];
        jt(i, i) += 2.0 * bus.gs_shunt * z[i];
        jt(nb_ + i, i) += 2.0 * bus.gs_shunt * z[nb_ + i];
        jt(i, nb_ + i) -= 2.0 * bus.bs_shunt * z[i];
        jt(nb_ + i, nb_ + i) -= 2.0 * bus.bs_shunt * z[nb_ + i];
    }
    for (std::size_t k = 0; k < p_quads_.size(); ++k) {
        scatter_grad(p_quads_[k], p_quads_[k].grad(z, nb_), 1.0, jt.col(quad_bus_[k]));
        scatter_grad(q_quads_[k], q_quads_[k].grad(z, nb_), 1.0, jt.col(nb_ + quad_bus_[k]));
    }
    for (int gi = 0; gi < ng_; ++gi) {
        const int bus = static_cast<int>(net_.bus_index(net_.generators()[gi].bus));
        jt(2 * nb_ + gi, bus) = -1.0;
        jt(2 * nb_ + ng_ + gi, nb_ + bus) = -1.0;
    }
    jt(nb_ + static_cast<int>(net_.slack_index()), 2 * nb_) = 1.0;
    return jt.transpose();
}

Eigen::VectorXd AcProblem::ineq(const Eigen::VectorXd& z) const {
    Eigen::VectorXd h(num_ineq());
    for (int r = 0; r < num_ineq(); ++r) {
        const Ineq& in = ineq_[r];
        switch (in.kind) {
            case IneqKind::vmin:
                h[r] = in.bound - (z[in.index] * z[in.index] + z[nb_ + in.index] * z[nb_ + in.index]);
                break;
            case IneqKind::vmax:
                h[r] = z[in.index] * z[in.index] + z[nb_ + in.index] * z[nb_ + in.index] - in.bound;
                break;
            case IneqKind::pmin: h[r] = in.bound - z[2 * nb_ + in.index]; break;
            case IneqKind::pmax: h[r] = z[2 * nb_ + in.index] - in.bound; break;
            case IneqKind::qmin: h[r] = in.bound - z[2 * nb_ + ng_ + in.index]; break;
            case IneqKind::qmax: h[r] = z[2 * nb_ + ng_ + in.index] - in.bound; break;
            case IneqKind::flow: {
                const double p = p_quads_[in.index].eval(z, nb_), q = q_quads_[in.index].eval(z, nb_);
                h[r] = p * p + q * q - in.bound;
                break;
            }
        }
    }
    return h;
}

Eigen::MatrixXd AcProblem::ineq_jacobian(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd jt = Eigen::MatrixXd::Zero(nv_, num_ineq());
    for (int r = 0; r < num_ineq(); ++r) {
        const Ineq& in = ineq_[r];
        const int i = in.index;
        switch (in.kind) {
            case IneqKind::vmin:
                jt(i, r) = -2.0 * z[i];
                jt(nb_ + i, r) = -2.0 * z[nb_ + i];
                break;
            case IneqKind::vmax:
                jt(i, r) = 2.0 * z[i];
                jt(nb_ + i, r) = 2.0 * z[nb_ + i];
                break;
            case IneqKind::pmin: jt(2 * nb_ + i, r) = -1.0; break;
            case IneqKind::pmax: jt(2 * nb_ + i, r) = 1.0; break;
            case IneqKind::qmin: jt(2 * nb_ + ng_ + i, r) = -1.0; break;
            case IneqKind::qmax: jt(2 * nb_ + ng_ + i, r) = 1.0; break;
            case IneqKind::flow: {
                const Quad& qp = p_quads_[i];
                const Quad& qq = q_quads_[i];
                scatter_grad(qp, qp.grad(z, nb_), 2.0 * qp.eval(z, nb_), jt.col(r));
                scatter_grad(qq, qq.grad(z, nb_), 2.0 * qq.eval(z, nb_), jt.col(r));
                break;
            }
        }
    }
    return jt.transpose();
}

Eigen::MatrixXd AcProblem::lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& lam,
                                              const Eigen::VectorXd& mu) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nv_, nv_);
    for (int g = 0; g < ng_; ++g) h(2 * nb_ + g, 2 * nb_ + g) = 2.0 * net_.generators()[g].cost_c2;
    for (int i = 0; i < nb_; ++i) {
        const Bus& bus = net_.buses()[i];
        const double w = 2.0 * (bus.gs_shunt * lam[i] - bus.bs_shunt * lam[nb_ + i]);
        h(i, i) += w;
        h(nb_ + i, nb_ + i) += w;
    }
    for (std::size_t k = 0; k < p_quads_.size(); ++k) {
        scatter_hess(p_quads_[k], 2.0 * p_quads_[k].q, lam[quad_bus_[k]], h);
        scatter_hess(q_quads_[k], 2.0 * q_quads_[k].q, lam[nb_ + quad_bus_[k]], h);
    }
    for (int r = 0; r < num_ineq(); ++r) {
        const Ineq& in = ineq_[r];
        if (in.kind == IneqKind::vmin || in.kind == IneqKind::vmax) {
            const double w = (in.kind == IneqKind::vmin ? -2.0 : 2.0) * mu[r];
            h(in.index, in.index) += w;
            h(nb_ + in.index, nb_ + in.index) += w;
        } else if (in.kind == IneqKind::flow) {
            const Quad& qp = p_quads_[in.index];
            const Quad& qq = q_quads_[in.index];
            const Eigen::Vector4d gp = qp.grad(z, nb_), gq = qq.grad(z, nb_);
            // qp and qq share the same (a, b) so one scatter covers both
            const Eigen::Matrix4d local = 2.0 * (gp * gp.transpose() + gq * gq.transpose() +
                                                 qp.eval(z, nb_) * 2.0 * qp.q + qq.eval(z, nb_) * 2.0 * qq.q);
            scatter_hess(qp, local, mu[r], h);
        }
    }
    return h;
}

NlResult solve_acopf(const Network& net, const VoltageProfile& start, const NlSettings& st) {
    const AcProblem prob(net);
    const int nv = prob.num_vars(), ne = prob.num_eq(), ni = prob.num_ineq();

    std::vector<double> pg0, qg0;
    auto mid = [](double lo, double hi) {
        if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
        if (std::isfinite(lo)) return lo + 1.0;
        if (std::isfinite(hi)) return hi - 1.0;
        return 0.0;
    };
    for (const Generator& g : net.generators()) {
        pg0.push_back(mid(g.p_min, g.p_max));
        qg0.push_back(mid(g.q_min, g.q_max));
    }
    Eigen::VectorXd z = prob.pack(start, pg0, qg0);

    Eigen::VectorXd h = prob.ineq(z);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(ni);
    Eigen::VectorXd mu = Eigen::VectorXd::Ones(ni);
    for (int r = 0; r < ni; ++r)
        if (h[r] < -1.0) {
            s[r] = -h[r];
            mu[r] = 1.0 / s[r];
        }
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(ne);
    double f = prob.objective(z);
    double gamma = 1.0;

    NlResult res;
    std::ostringstream diag;
    bool converged = false;
    auto inf_norm = [](const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; };

    for (int iter = 0; iter < st.max_iterations; ++iter) {
        const Eigen::VectorXd g = prob.eq(z);
        h = prob.ineq(z);
        const Eigen::MatrixXd jg = prob.eq_jacobian(z);
        const Eigen::MatrixXd jh = prob.ineq_jacobian(z);
        const Eigen::VectorXd lx = prob.objective_gradient(z) + jg.transpose() * lam + jh.transpose() * mu;

        const double zn = inf_norm(z);
        const double hmax = ni ? h.maxCoeff() : 0.0;
        const double feas = std::max(inf_norm(g), hmax) / (1.0 + std::max(zn, inf_norm(s)));
        const double grad = inf_norm(lx) / (1.0 + std::max(inf_norm(lam), inf_norm(mu)));
        const double comp = s.dot(mu) / (1.0 + zn);
        res.iterations = iter;
        if (iter > 0 && feas < st.feasibility_tol && grad < st.gradient_tol && comp < st.complementarity_tol) {
            converged = true;
            break;
        }

        const Eigen::VectorXd sinv = s.cwiseInverse();
        const Eigen::MatrixXd hess = prob.lagrangian_hessian(z, lam, mu);
        const Eigen::MatrixXd m = hess + jh.transpose() * (mu.cwiseProduct(sinv)).asDiagonal() * jh;
        const Eigen::VectorXd n =
            lx + jh.transpose() * (mu.cwiseProduct(h) + Eigen::VectorXd::Constant(ni, gamma)).cwiseProduct(sinv);

        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
        kkt.topLeftCorner(nv, nv) = m;
        kkt.topRightCorner(nv, ne) = jg.transpose();
        kkt.bottomLeftCorner(ne, nv) = jg;
        Eigen::VectorXd rhs(nv + ne);
        rhs << -n, -g;
        const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
        if (!sol.allFinite()) {
            diag << "singular Newton system at iteration " << iter;
            break;
        }
        const Eigen::VectorXd dz = sol.head(nv), dlam = sol.tail(ne);
        const Eigen::VectorXd ds = -h - s - jh * dz;
        const Eigen::VectorXd dmu = -mu + (Eigen::VectorXd::Constant(ni, gamma) - mu.cwiseProduct(ds)).cwiseProduct(sinv);

        double ap = 1.0, ad = 1.0;
        for (int r = 0; r < ni; ++r) {
            if (ds[r] < 0.0) ap = std::min(ap, st.step_fraction * -s[r] / ds[r]);
            if (dmu[r] < 0.0) ad = std::min(ad, st.step_fraction * -mu[r] / dmu[r]);
        }

        // backtrack while the trial point is not finite or the constraint
        // residual explodes
        const double merit0 = std::max(inf_norm(g), inf_norm(h + s));
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            const Eigen::VectorXd zt = z + ap * dz;
            const Eigen::VectorXd st_ = s + ap * ds;
            const double merit = std::max(inf_norm(prob.eq(zt)), inf_norm(prob.ineq(zt) + st_));
            if (zt.allFinite() && std::isfinite(merit) && merit <= 1e3 * std::max(merit0, 1e-6)) {
                accepted = true;
                break;
            }
            ap *= 0.5;
            ad *= 0.5;
        }
        if (!accepted || ap < 1e-12) {
            diag << "line search stalled at iteration " << iter;
            break;
        }

        z += ap * dz;
        s += ap * ds;
        lam += ad * dlam;
        mu += ad * dmu;
        if (ni > 0) gamma = st.centering * s.dot(mu) / ni;
        f = prob.objective(z);
        if (inf_norm(z) > 1e8) {
            diag << "iterates diverged at iteration " << iter;
            break;
        }
        res.iterations = iter + 1;
    }

    // reference orientation: slack bus e > 0
    const int sl = static_cast<int>(net.slack_index());
    if (z[sl] < 0.0) z.head(2 * static_cast<int>(net.num_buses())) *= -1.0;

    res.voltage = prob.voltage(z);
    res.p_gen = prob.p_gen(z);
    res.q_gen = prob.q_gen(z);
    res.objective = f;
    res.max_violation = ac_residual(net, res.voltage, res.p_gen, res.q_gen);
    if (converged && res.max_violation <= 1e-6) {
        res.status = NlStatus::local_optimal;
    } else {
        res.status = NlStatus::infeasible_or_stalled;
        if (converged) diag << "converged with violation " << res.max_violation;
        if (diag.str().empty()) diag << "no convergence within " << st.max_iterations << " iterations";
    }
    res.diagnostics = diag.str();
    return res;
}

NlResult solve_acopf_warm(const Network& net, const NlSettings& settings, const IpmSettings& ipm) {
    NlResult flat = solve_acopf(net, flat_profile(net), settings);
    const ConicModel m = build_sdp(net);
    const IpmResult r = solve(m.program, ipm);
    if (r.status != SolveStatus::optimal) return flat;
    NlResult warm = solve_acopf(net, recover_voltage(extract_solution(m.program, m.map, net, r), net), settings);
    if (warm.status != NlStatus::local_optimal) return flat;
    if (flat.status == NlStatus::local_optimal && flat.objective < warm.objective) return flat;
    return warm;
}

VoltageProfile recover_voltage(const RelaxSolution& sol, const Network& net) {
    if (!sol.optimal()) throw ModelError("voltage recovery needs an optimal relaxation solution");
    const std::size_t n = net.num_buses();
    if (sol.c_diag.size() != n) throw ModelError("solution does not match the network");
    const BusGraph g = build_graph(net);
    const int root = static_cast<int>(net.slack_index());
    const auto parent = bfs_parents(g, root);

    std::vector<double> theta(n, 0.0);
    std::vector<int> order;
    order.reserve(n);
    order.push_back(root);
    for (std::size_t k = 0; k < order.size(); ++k)
        for (int w : g.neighbors(order[k]))
            if (parent[w] == order[k]) order.push_back(w);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const int j = order[k], i = parent[j];
        if (!sol.has_pair(i, j)) throw ModelError("missing lifted pair on a spanning-tree edge");
        const auto [c, s] = sol.pair(i, j);
        theta[j] = theta[i] + std::atan2(s, c);
    }

    VoltageProfile v;
    v.e.resize(n);
    v.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::sqrt(std::max(sol.c_diag[i], 0.0));
        v.e[i] = mag * std::cos(theta[i]);
        v.f[i] = mag * std::sin(theta[i]);
    }
    return v;
}

double ac_residual(const Network& net, const VoltageProfile& v, const std::vector<double>& p_gen,
                   const std::vector<double>& q_gen) {
    const AcProblem prob(net);
    const Eigen::VectorXd z = prob.pack(v, p_gen, q_gen);
    const Eigen::VectorXd g = prob.eq(z);
    const int nb = static_cast<int>(net.num_buses());
    const double balance = g.head(2 * nb).cwiseAbs().maxCoeff();

    double bound = 0.0;
    for (int i = 0; i < nb; ++i) {
        const Bus& bus = net.buses()[i];
        const double mag = v.magnitude(i);
        bound = std::max({bound, bus.v_min - mag, mag - bus.v_max});
    }
    for (std::size_t k = 0; k < net.num_generators(); ++k) {
        const Generator& gen = net.generators()[k];
        bound = std::max({bound, gen.p_min - p_gen[k], p_gen[k] - gen.p_max, gen.q_min - q_gen[k],
                          q_gen[k] - gen.q_max});
    }
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        const Branch& br = net.branches()[k];
        if (!br.rated()) continue;
        const std::size_t f = net.from_index(k), t = net.to_index(k);
        const double c = v.e[f] * v.e[t] + v.f[f] * v.f[t];
        const double s = v.e[f] * v.f[t] - v.f[f] * v.e[t];
        const double cf = v.e[f] * v.e[f] + v.f[f] * v.f[f];
        const double ct = v.e[t] * v.e[t] + v.f[t] * v.f[t];
        const double sf = std::abs(net.coeffs()[k].from_flow(cf, c, s));
        const double sto = std::abs(net.coeffs()[k].to_flow(ct, c, s));
        bound = std::max({bound, sf - br.s_max, sto - br.s_max});
    }
    return balance + bound;
}

}  // namespace acrelax

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#ifndef ACRELAX_TEST_DATA_DIR
#error "ACRELAX_TEST_DATA_DIR must point at the case directory"
#endif

namespace fixtures {

using namespace acrelax;

std::string data_path(const std::string& file) { return std::string(ACRELAX_TEST_DATA_DIR) + "/" + file; }

Network random_radial(Rng& rng, int n) {
    std::vector<Bus> buses(n);
    double total_p = 0.0;
    for (int i = 0; i < n; ++i) {
        Bus& b = buses[i];
        b.id = i + 1;
        b.v_min = 0.85;
        b.v_max = 1.15;
        b.is_slack = i == 0;
        if (i > 0) {
            b.p_demand = uniform(rng, 0.02, 0.15);
            b.q_demand = uniform(rng, 0.0, 0.08);
        }
        total_p += b.p_demand;
    }
    std::vector<Branch> branches;
    for (int i = 1; i < n; ++i) {
        Branch br;
        br.from_bus = uniform_int(rng, 0, i - 1) + 1;
        br.to_bus = i + 1;
        br.r = uniform(rng, 0.002, 0.02);
        br.x = uniform(rng, 0.005, 0.04);
        branches.push_back(br);
    }
    std::vector<Generator> gens;
    Generator root;
    root.bus = 1;
    root.p_max = 2.0 * total_p + 1.0;
    root.q_min = -root.p_max;
    root.q_max = root.p_max;
    root.cost_c1 = uniform(rng, 1000, 3000);
    root.cost_c2 = uniform(rng, 50, 500);
    gens.push_back(root);
    const int extra = uniform_int(rng, 0, 2);
    for (int k = 0; k < extra; ++k) {
        Generator g;
        g.bus = uniform_int(rng, 2, n);
        g.p_max = uniform(rng, 0.05, 0.2);
        g.q_min = -0.1;
        g.q_max = 0.1;
        g.cost_c1 = uniform(rng, 1500, 4000);
        g.cost_c2 = uniform(rng, 50, 500);
        gens.push_back(g);
    }
    return Network(100.0, std::move(buses), std::move(branches), std::move(gens), "radial" + std::to_string(n));
}

Network random_meshed5(Rng& rng) {
    std::vector<Bus> buses(5);
    for (int i = 0; i < 5; ++i) {
        Bus& b = buses[i];
        b.id = 10 * (i + 1);
        b.p_demand = i == 0 ? 0.0 : uniform(rng, 0.1, 0.6);
        b.q_demand = i == 0 ? 0.0 : uniform(rng, -0.05, 0.2);
        b.gs_shunt = uniform(rng, 0.0, 0.02);
        b.bs_shunt = uniform(rng, -0.05, 0.05);
        b.v_min = 0.94;
        b.v_max = 1.06;
        b.is_slack = i == 0;
    }
    const int ends[][2] = {{10, 20}, {20, 30}, {30, 40}, {40, 50}, {50, 10}, {20, 40}};
    std::vector<Branch> branches;
    for (const auto& e : ends) {
        Branch br;
        br.from_bus = e[0];
        br.to_bus = e[1];
        br.r = uniform(rng, 0.005, 0.05);
        br.x = uniform(rng, 0.02, 0.2);
        br.b_charge = uniform(rng, 0.0, 0.1);
        br.s_max = uniform(rng, 0.5, 2.0);
        branches.push_back(br);
    }
    branches[2].tap = uniform(rng, 0.95, 1.05);
    branches[2].shift = uniform(rng, -5.0, 5.0);
    std::vector<Generator> gens(2);
    gens[0].bus = 10;
    gens[1].bus = 30;
    for (auto& g : gens) {
        g.p_min = 0.0;
        g.p_max = 3.0;
        g.q_min = -1.5;
        g.q_max = 1.5;
        g.cost_c2 = uniform(rng, 100, 1000);
        g.cost_c1 = uniform(rng, 1000, 4000);
        g.cost_c0 = uniform(rng, 0, 100);
    }
    return Network(100.0, std::move(buses), std::move(branches), std::move(gens), "mesh5");
}

InequalityLp random_lp(Rng& rng, int n) {
    std::normal_distribution<double> normal;
    InequalityLp lp;
    lp.box = 5.0;
    const int m = uniform_int(rng, n, 3 * n + 2);
    lp.G.resize(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) lp.G(i, j) = normal(rng);
    Eigen::VectorXd z0(n);
    for (int j = 0; j < n; ++j) z0[j] = uniform(rng, -2.0, 2.0);
    lp.h = lp.G * z0;
    for (int i = 0; i < m; ++i) lp.h[i] += uniform(rng, 0.1, 2.0);
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = normal(rng);
    return lp;
}

ConicProgram to_conic(const InequalityLp& lp) {
    const int n = static_cast<int>(lp.c.size());
    const int m = static_cast<int>(lp.h.size());
    // columns: u (n), w (m), v (n); u = z + box
    const int nv = 2 * n + m;
    ConicProgram p;
    p.c = Eigen::VectorXd::Zero(nv);
    p.c.head(n) = lp.c;
    p.objective_offset = -lp.box * lp.c.sum();
    std::vector<Triplet> t;
    p.b.resize(m + n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j)
            if (lp.G(i, j) != 0.0) t.emplace_back(i, j, lp.G(i, j));
        t.emplace_back(i, n + i, 1.0);
        p.b[i] = lp.h[i] + lp.box * lp.G.row(i).sum();
    }
    for (int j = 0; j < n; ++j) {
        t.emplace_back(m + j, j, 1.0);
        t.emplace_back(m + j, n + m + j, 1.0);
        p.b[m + j] = 2.0 * lp.box;
    }
    p.A.resize(m + n, nv);
    p.A.setFromTriplets(t.begin(), t.end());
    p.cones = {Cone{ConeKind::nonnegative, 0, nv}};
    return p;
}

double vertex_enumeration(const InequalityLp& lp) {
    const int n = static_cast<int>(lp.c.size());
    const int m = static_cast<int>(lp.h.size());
    const int total = m + 2 * n;
    Eigen::MatrixXd G(total, n);
    Eigen::VectorXd h(total);
    G.topRows(m) = lp.G;
    h.head(m) = lp.h;
    G.middleRows(m, n) = Eigen::MatrixXd::Identity(n, n);
    G.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    h.tail(2 * n).setConstant(lp.box);

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd r(n);
        for (int k = 0; k < n; ++k) {
            M.row(k) = G.row(pick[k]);
            r[k] = h[pick[k]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.rank() == n) {
            const Eigen::VectorXd z = lu.solve(r);
            const Eigen::VectorXd viol = G * z - h;
            if (viol.maxCoeff() <= 1e-9 * (1.0 + h.cwiseAbs().maxCoeff())) best = std::min(best, lp.c.dot(z));
        }
        int k = n - 1;
        while (k >= 0 && pick[k] == total - n + k) --k;
        if (k < 0) break;
        ++pick[k];
        for (int j = k + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

namespace {

// Interior point of the cone block (also interior to its dual).
void interior_point(Rng& rng, const Cone& k, Eigen::Ref<Eigen::VectorXd> x) {
    std::normal_distribution<double> normal;
    switch (k.kind) {
        case ConeKind::nonnegative:
            for (int i = 0; i < k.dim; ++i) x[i] = uniform(rng, 0.2, 2.0);
            break;
        case ConeKind::second_order: {
            for (int i = 1; i < k.dim; ++i) x[i] = normal(rng);
            x[0] = x.tail(k.dim - 1).norm() + uniform(rng, 0.2, 2.0);
            break;
        }
        case ConeKind::rotated_second_order: {
            for (int i = 2; i < k.dim; ++i) x[i] = normal(rng);
            x[0] = uniform(rng, 0.5, 2.0);
            x[1] = (x.tail(k.dim - 2).squaredNorm() + uniform(rng, 0.2, 2.0)) / x[0];
            break;
        }
        case ConeKind::psd: {
            const int n = k.side();
            Eigen::MatrixXd M(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
            x = svec(M * M.transpose() + uniform(rng, 0.2, 1.0) * Eigen::MatrixXd::Identity(n, n));
            break;
        }
    }
}

ConicProgram random_program(Rng& rng, std::vector<Cone> cones) {
    std::normal_distribution<double> normal;
    int nv = 0;
    for (auto& k : cones) {
        k.start = nv;
        nv += k.dim;
    }
    const int m = uniform_int(rng, std::max(1, nv / 3), nv - 1);
    Eigen::MatrixXd A(m, nv);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < nv; ++j) A(i, j) = uniform(rng, 0.0, 1.0) < 0.6 ? normal(rng) : 0.0;
    Eigen::VectorXd x0(nv), s0(nv), y0(m);
    for (const auto& k : cones) {
        interior_point(rng, k, x0.segment(k.start, k.dim));
        interior_point(rng, k, s0.segment(k.start, k.dim));
    }
    for (int i = 0; i < m; ++i) y0[i] = normal(rng);
    ConicProgram p;
    p.A = A.sparseView();
    p.b = A * x0;
    p.c = A.transpose() * y0 + s0;
    p.cones = std::move(cones);
    return p;
}

// dual: the rotated cone's dual is 4 s0 s1 >= ||s2||^2, the others are self-dual
double jordan_min(const Cone& k, const Eigen::VectorXd& x, bool dual) {
    switch (k.kind) {
        case ConeKind::nonnegative: return x.minCoeff();
        case ConeKind::second_order: return x[0] - x.tail(k.dim - 1).norm();
        case ConeKind::rotated_second_order: {
            Eigen::VectorXd v(k.dim - 1);
            v[0] = x[0] - x[1];
            v.tail(k.dim - 2) = (dual ? 1.0 : 2.0) * x.tail(k.dim - 2);
            return 0.5 * (x[0] + x[1] - v.norm());
        }
        case ConeKind::psd: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(x), Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff();
        }
    }
    return 0.0;
}

}  // namespace

ConicProgram random_socp(Rng& rng) {
    std::vector<Cone> cones;
    cones.push_back({ConeKind::nonnegative, 0, uniform_int(rng, 1, 4)});
    const int nsoc = uniform_int(rng, 1, 3);
    for (int k = 0; k < nsoc; ++k) cones.push_back({ConeKind::second_order, 0, uniform_int(rng, 3, 5)});
    if (uniform_int(rng, 0, 1)) cones.push_back({ConeKind::rotated_second_order, 0, uniform_int(rng, 3, 4)});
    return random_program(rng, std::move(cones));
}

ConicProgram random_sdp(Rng& rng) {
    std::vector<Cone> cones;
    cones.push_back({ConeKind::nonnegative, 0, uniform_int(rng, 1, 3)});
    const int nblocks = uniform_int(rng, 1, 2);
    for (int k = 0; k < nblocks; ++k) cones.push_back({ConeKind::psd, 0, svec_dim(uniform_int(rng, 2, 4))});
    return random_program(rng, std::move(cones));
}

double RelativeKkt::worst() const { return std::max({primal, dual, gap, cone}); }

RelativeKkt relative_kkt(const ConicProgram& p, const IpmResult& r) {
    RelativeKkt k;
    k.primal = (p.A * r.x - p.b).norm() / (1.0 + p.b.norm());
    k.dual = (p.A.transpose() * r.y + r.s - p.c).norm() / (1.0 + p.c.norm());
    k.gap = std::abs(r.x.dot(r.s)) / (1.0 + std::abs(p.c.dot(r.x)));
    for (const auto& cone : p.cones) {
        k.cone = std::max(k.cone, -jordan_min(cone, r.x.segment(cone.start, cone.dim), false));
        k.cone = std::max(k.cone, -jordan_min(cone, r.s.segment(cone.start, cone.dim), true));
    }
    return k;
}

RelaxSolution solution_from_voltage(const Network& net, const std::vector<Clique>& cliques, const VoltageProfile& v,
                                    Relaxation method) {
    using cd = std::complex<double>;
    RelaxSolution sol;
    sol.status = SolveStatus::optimal;
    sol.method = method;
    sol.cliques = cliques;
    const std::size_t n = net.num_buses();
    auto phasor = [&](int i) { return cd(v.e[i], v.f[i]); };
    for (std::size_t i = 0; i < n; ++i) sol.c_diag.push_back(std::norm(phasor(static_cast<int>(i))));
    for (const auto& c : cliques) {
        const auto sz = c.members.size();
        Eigen::MatrixXcd w(sz, sz);
        for (std::size_t a = 0; a < sz; ++a)
            for (std::size_t b = 0; b < sz; ++b) {
                w(a, b) = std::conj(phasor(c.members[a])) * phasor(c.members[b]);
                if (a < b) {
                    const int i = c.members[a], j = c.members[b];
                    sol.pairs[{i, j}] = {w(a, b).real(), w(a, b).imag()};
                }
            }
        if (method == Relaxation::sdp) sol.clique_w.push_back(w);
    }
    return sol;
}

double max_cone_slack(const RelaxSolution& sol) {
    double worst = 0.0;
    for (const auto& [e, cs] : sol.pairs) {
        const double prod = sol.c_diag[e.first] * sol.c_diag[e.second];
        worst = std::max(worst, (prod - cs.first * cs.first - cs.second * cs.second) / prod);
    }
    return worst;
}

}  // namespace fixtures

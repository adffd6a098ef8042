#include "acrelax/conic_program.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace acrelax {

const char* to_string(ConeKind kind) noexcept {
    switch (kind) {
        case ConeKind::nonnegative: return "nonnegative";
        case ConeKind::second_order: return "second_order";
        case ConeKind::rotated_second_order: return "rotated_second_order";
        case ConeKind::psd: return "psd";
    }
    return "?";
}

int svec_side(int dim) {
    const int side = static_cast<int>(std::lround((std::sqrt(8.0 * dim + 1.0) - 1.0) / 2.0));
    if (svec_dim(side) != dim) throw std::invalid_argument("not a packed triangle length");
    return side;
}

int Cone::side() const noexcept { return kind == ConeKind::psd ? svec_side(dim) : 0; }

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const int k = svec_side(static_cast<int>(v.size()));
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd m(k, k);
    for (int j = 0; j < k; ++j) {
        m(j, j) = v[svec_index(k, j, j)];
        for (int i = j + 1; i < k; ++i) m(i, j) = m(j, i) = v[svec_index(k, i, j)] * inv_rt2;
    }
    return m;
}

Eigen::VectorXd svec(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    const int k = static_cast<int>(m.rows());
    const double rt2 = std::sqrt(2.0);
    Eigen::VectorXd v(svec_dim(k));
    for (int j = 0; j < k; ++j) {
        v[svec_index(k, j, j)] = m(j, j);
        for (int i = j + 1; i < k; ++i) v[svec_index(k, i, j)] = rt2 * 0.5 * (m(i, j) + m(j, i));
    }
    return v;
}

void ConicProgram::validate() const {
    if (A.rows() != b.size() || A.cols() != c.size())
        throw std::invalid_argument("conic program: A, b, c dimensions disagree");
    int next = 0;
    for (const Cone& k : cones) {
        if (k.start != next) throw std::invalid_argument("conic program: cone spans do not partition columns");
        if (k.dim <= 0) throw std::invalid_argument("conic program: empty cone");
        if (k.kind == ConeKind::rotated_second_order && k.dim < 2)
            throw std::invalid_argument("conic program: rotated cone needs dim >= 2");
        if (k.kind == ConeKind::psd) (void)svec_side(k.dim);
        next = k.end();
    }
    if (next != num_vars()) throw std::invalid_argument("conic program: cones do not cover all columns");
}

void ConicProgram::dump(std::ostream& out) const {
    out << std::setprecision(17);
    out << "acrelax-conic 1\n";
    out << "vars " << num_vars() << " rows " << num_rows() << " nnz " << A.nonZeros() << " cones "
        << cones.size() << " offset " << objective_offset << "\n";
    for (const Cone& k : cones) out << "cone " << to_string(k.kind) << ' ' << k.start << ' ' << k.dim << "\n";
    for (int j = 0; j < num_vars(); ++j)
        if (c[j] != 0.0) out << "c " << j << ' ' << c[j] << "\n";
    for (int i = 0; i < num_rows(); ++i)
        if (b[i] != 0.0) out << "b " << i << ' ' << b[i] << "\n";
    for (int j = 0; j < A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << "\n";
}

ConicProgram read_conic_dump(std::istream& in) {
    auto fail = [](const std::string& m) { throw std::runtime_error("conic dump: " + m); };
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "acrelax-conic" || version != 1) fail("bad header");
    int n = 0, m = 0, p = 0;
    long nnz = 0;
    ConicProgram prog;
    std::string w1, w2, w3, w4, w5;
    if (!(in >> w1 >> n >> w2 >> m >> w3 >> nnz >> w4 >> p >> w5 >> prog.objective_offset))
        fail("bad size line");
    prog.c = Eigen::VectorXd::Zero(n);
    prog.b = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < p; ++k) {
        std::string tag, kind;
        Cone cone;
        if (!(in >> tag >> kind >> cone.start >> cone.dim) || tag != "cone") fail("bad cone line");
        if (kind == "nonnegative") cone.kind = ConeKind::nonnegative;
        else if (kind == "second_order") cone.kind = ConeKind::second_order;
        else if (kind == "rotated_second_order") cone.kind = ConeKind::rotated_second_order;
        else if (kind == "psd") cone.kind = ConeKind::psd;
        else fail("unknown cone " + kind);
        prog.cones.push_back(cone);
    }
    std::vector<Triplet> trips;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == 'c' || line[0] == 'b') {
            char tag;
            int idx;
            double v;
            ls >> tag >> idx >> v;
            (tag == 'c' ? prog.c : prog.b)[idx] = v;
        } else {
            int r, col;
            double v;
            if (!(ls >> r >> col >> v)) fail("bad triplet");
            trips.emplace_back(r, col, v);
        }
    }
    if (static_cast<long>(trips.size()) != nnz) fail("nnz mismatch");
    prog.A.resize(m, n);
    prog.A.setFromTriplets(trips.begin(), trips.end());
    prog.validate();
    return prog;
}

}  // namespace acrelax

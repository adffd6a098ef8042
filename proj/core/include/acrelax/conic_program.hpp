#pragma once

// Canonical conic program
//
//     minimize    c'x + offset
//     subject to  A x = b,  x in K = K_1 x ... x K_p
//
// where each K_i occupies a contiguous column span. PSD blocks are stored as
// lower-triangular packed vectors with off-diagonals scaled by sqrt(2), so the
// Euclidean inner product of packed vectors equals the trace inner product.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

namespace acrelax {

enum class ConeKind {
    nonnegative,
    second_order,          // x0 >= ||x_{1:}||
    rotated_second_order,  // x0 * x1 >= ||x_{2:}||^2, x0, x1 >= 0
    psd,                   // svec of a symmetric PSD matrix
};

const char* to_string(ConeKind kind) noexcept;

struct Cone {
    ConeKind kind = ConeKind::nonnegative;
    int start = 0;
    int dim = 0;  // number of columns; psd: side*(side+1)/2

    int side() const noexcept;  // psd only
    int end() const noexcept { return start + dim; }
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

struct ConicProgram {
    Eigen::VectorXd c;
    SparseMatrix A;
    Eigen::VectorXd b;
    std::vector<Cone> cones;
    double objective_offset = 0.0;

    int num_vars() const noexcept { return static_cast<int>(c.size()); }
    int num_rows() const noexcept { return static_cast<int>(b.size()); }

    /// Throws std::invalid_argument unless cone spans partition the columns and
    /// all dimensions agree.
    void validate() const;

    /// Plain-text sparse-triplet dump:
    ///   acrelax-conic 1
    ///   vars <n> rows <m> nnz <k> cones <p> offset <v>
    ///   cone <kind> <start> <dim>          (p lines)
    ///   c <col> <value>                    (nonzeros of c)
    ///   b <row> <value>                    (nonzeros of b)
    ///   <row> <col> <value>                (nonzeros of A)
    void dump(std::ostream& out) const;
};

ConicProgram read_conic_dump(std::istream& in);

// --- packed symmetric storage -------------------------------------------

inline int svec_dim(int side) noexcept { return side * (side + 1) / 2; }
int svec_side(int dim);
/// Packed position of entry (i, j) of a side x side matrix, column-major lower
/// triangle (i >= j required).
inline int svec_index(int side, int i, int j) noexcept {
    return j * side - j * (j - 1) / 2 + (i - j);
}
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd svec(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace acrelax

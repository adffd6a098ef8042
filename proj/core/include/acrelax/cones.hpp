#pragma once

// Symmetric-cone primitives used by the interior-point solver: Jordan algebra,
// Nesterov-Todd scaling, step-to-boundary. Rotated cones are mapped to
// second-order cones before they reach this layer.

#include <Eigen/Core>
#include <memory>
#include <span>
#include <vector>

#include "acrelax/conic_program.hpp"

namespace acrelax::cones {

using Vec = Eigen::VectorXd;
using ConstSeg = Eigen::Ref<const Eigen::VectorXd>;
using Seg = Eigen::Ref<Eigen::VectorXd>;

/// One block of a symmetric cone. Scaling state is set by `set_scaling` and
/// consumed by the apply/hessian calls; blocks are not thread-shared.
///
/// With W the NT scaling, lambda = W x = W^{-T} s.
class Block {
public:
    virtual ~Block() = default;

    virtual int dim() const noexcept = 0;
    virtual int degree() const noexcept = 0;
    virtual void identity(Seg e) const = 0;

    /// Largest alpha >= 0 with x + alpha*dx in the cone (infinity if none).
    virtual double max_step(ConstSeg x, ConstSeg dx) const = 0;
    /// Distance-like interior measure: min eigenvalue in the Jordan sense.
    virtual double min_eigenvalue(ConstSeg x) const = 0;

    /// Returns false if x or s is not strictly interior.
    virtual bool set_scaling(ConstSeg x, ConstSeg s) = 0;
    virtual void lambda(Seg out) const = 0;
    virtual void apply_w(ConstSeg in, Seg out) const = 0;
    virtual void apply_wt(ConstSeg in, Seg out) const = 0;
    /// Dense H = W'W (dim x dim).
    virtual void hessian(Eigen::Ref<Eigen::MatrixXd> out) const = 0;
    virtual bool diagonal_hessian() const noexcept { return false; }

    /// Jordan product u o v.
    virtual void product(ConstSeg u, ConstSeg v, Seg out) const = 0;
    /// Solve lambda o w = r for w.
    virtual void divide_by_lambda(ConstSeg r, Seg out) const = 0;
};

class Nonnegative final : public Block {
public:
    explicit Nonnegative(int dim) : n_(dim), w_(dim), lam_(dim) {}
    int dim() const noexcept override { return n_; }
    int degree() const noexcept override { return n_; }
    void identity(Seg e) const override;
    double max_step(ConstSeg x, ConstSeg dx) const override;
    double min_eigenvalue(ConstSeg x) const override;
    bool set_scaling(ConstSeg x, ConstSeg s) override;
    void lambda(Seg out) const override { out = lam_; }
    void apply_w(ConstSeg in, Seg out) const override;
    void apply_wt(ConstSeg in, Seg out) const override { apply_w(in, out); }
    void hessian(Eigen::Ref<Eigen::MatrixXd> out) const override;
    bool diagonal_hessian() const noexcept override { return true; }
    void product(ConstSeg u, ConstSeg v, Seg out) const override;
    void divide_by_lambda(ConstSeg r, Seg out) const override;

    const Vec& hessian_diagonal() const noexcept { return h_; }

private:
    int n_;
    Vec w_, lam_, h_;
};

class SecondOrder final : public Block {
public:
    explicit SecondOrder(int dim) : n_(dim), wbar_(dim), lam_(dim) {}
    int dim() const noexcept override { return n_; }
    int degree() const noexcept override { return 1; }
    void identity(Seg e) const override;
    double max_step(ConstSeg x, ConstSeg dx) const override;
    double min_eigenvalue(ConstSeg x) const override;
    bool set_scaling(ConstSeg x, ConstSeg s) override;
    void lambda(Seg out) const override { out = lam_; }
    void apply_w(ConstSeg in, Seg out) const override;
    void apply_wt(ConstSeg in, Seg out) const override { apply_w(in, out); }
    void apply_w_inverse(ConstSeg in, Seg out) const;
    void hessian(Eigen::Ref<Eigen::MatrixXd> out) const override;
    void product(ConstSeg u, ConstSeg v, Seg out) const override;
    void divide_by_lambda(ConstSeg r, Seg out) const override;

private:
    int n_;
    double eta_ = 1.0;
    Vec wbar_, lam_;
};

class Semidefinite final : public Block {
public:
    explicit Semidefinite(int side);
    int dim() const noexcept override { return svec_dim(k_); }
    int degree() const noexcept override { return k_; }
    void identity(Seg e) const override;
    double max_step(ConstSeg x, ConstSeg dx) const override;
    double min_eigenvalue(ConstSeg x) const override;
    bool set_scaling(ConstSeg x, ConstSeg s) override;
    void lambda(Seg out) const override;
    void apply_w(ConstSeg in, Seg out) const override;
    void apply_wt(ConstSeg in, Seg out) const override;
    void apply_w_inverse(ConstSeg in, Seg out) const;
    void hessian(Eigen::Ref<Eigen::MatrixXd> out) const override;
    void product(ConstSeg u, ConstSeg v, Seg out) const override;
    void divide_by_lambda(ConstSeg r, Seg out) const override;

private:
    int k_;
    Eigen::MatrixXd r_, rinv_;  // X = R Lambda R', S = R^{-T} Lambda R^{-1}
    Eigen::VectorXd lam_;
};

/// Solver-side cone list (nonnegative, second-order, semidefinite only).
struct Product {
    std::vector<std::unique_ptr<Block>> blocks;
    std::vector<int> starts;
    int dim = 0;
    int degree = 0;

    void add(std::unique_ptr<Block> b);
    void identity(Seg e) const;
    double max_step(ConstSeg x, ConstSeg dx) const;
    double min_eigenvalue(ConstSeg x) const;
    bool set_scaling(ConstSeg x, ConstSeg s);
    void lambda(Seg out) const;
    void apply_w(ConstSeg in, Seg out) const;
    void apply_wt(ConstSeg in, Seg out) const;
    void product(ConstSeg u, ConstSeg v, Seg out) const;
    void divide_by_lambda(ConstSeg r, Seg out) const;
};

}  // namespace acrelax::cones

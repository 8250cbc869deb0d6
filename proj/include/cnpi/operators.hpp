#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnpi {

// Failure of the implicit solve (indefinite composite, iteration cap, ...).
// Parameter-domain problems throw std::invalid_argument instead.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpatialGrid {
    int dim = 1;   // 1 or 2
    int M = 2;     // partitions per dimension
    double L = 1.0;

    double h() const { return L / M; }
    long interior_count() const {
        long s = M - 1;
        return dim == 1 ? s : s * s;
    }
};

SpatialGrid make_grid(int dim, int M, double L);

// Self-adjoint positive-semidefinite operator on interior-point vectors.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual long size() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    // Extreme eigenvalues, used for the definiteness check before a shifted solve.
    virtual double eigenvalue_min() const = 0;
    virtual double eigenvalue_max() const = 0;
    // Constant-coefficient tridiagonal stencil (diag, off) if the operator has
    // one; enables the direct solve path.
    virtual std::optional<std::pair<double, double>> tridiagonal_stencil() const {
        return std::nullopt;
    }
};

enum class BundleKind { Laplace1D, Laplace2D, Scalar };

struct OperatorBundle {
    BundleKind kind = BundleKind::Scalar;
    std::shared_ptr<const LinearOperator> A;
    std::vector<std::shared_ptr<const LinearOperator>> B;
    std::optional<SpatialGrid> grid; // absent for scalar bundles

    long size() const { return A->size(); }
    int m() const { return static_cast<int>(B.size()); }
    // Weight of one grid point in the discrete L2 norm (h^dim; 1 for scalars).
    double norm_weight() const;
};

// A = B_j = second-difference Laplacian on (0,L) with zero boundary values.
OperatorBundle make_laplace_bundle_1d(const SpatialGrid& grid, int m);

// A = 2D five-point Laplacian; B_1, B_2 = second difference along x1, x2.
OperatorBundle make_laplace_bundle_2d(const SpatialGrid& grid);

// 1x1 "operators": A multiplies by a, B_j by b[j]. Gives hand-checkable
// recurrences for stepper tests.
OperatorBundle make_scalar_bundle(double a, std::vector<double> b);

std::vector<double> apply_operator(const LinearOperator& op, std::span<const double> x);

// Solve (c0 I + cA A + sum_j cB[j] B_j) x = rhs.  Rejects shift combinations
// whose eigenvalue bounds cannot certify positive definiteness.  Tridiagonal
// bundles (1D, scalar) use direct elimination; otherwise matrix-free conjugate
// gradients with relative residual 1e-12, iteration cap 10*size, warm-started
// from x0 when given.
std::vector<double> solve_shifted(const OperatorBundle& bundle, double c0, double cA,
                                  std::span<const double> cB, std::span<const double> rhs,
                                  std::span<const double> x0 = {});

} // namespace cnpi

#include "cnpi/operators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cnpi {

SpatialGrid make_grid(int dim, int M, double L) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
    if (M < 2) throw std::invalid_argument("grid: M must be >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("grid: L must be > 0");
    return SpatialGrid{dim, M, L};
}

namespace {

// Eigenvalues of the 1D second-difference operator: (4/h^2) sin^2(j pi / 2M).
double laplace_eig(int M, double h, int j) {
    const double s = std::sin(0.5 * j * std::numbers::pi / M);
    return 4.0 / (h * h) * s * s;
}

class Laplace1D final : public LinearOperator {
public:
    Laplace1D(int M, double L) : M_(M), h_(L / M) {}
    long size() const override { return M_ - 1; }
    void apply(std::span<const double> x, std::span<double> y) const override {
        const long n = size();
        const double ih2 = 1.0 / (h_ * h_);
        for (long i = 0; i < n; ++i) {
            double v = 2.0 * x[i];
            if (i > 0) v -= x[i - 1];
            if (i + 1 < n) v -= x[i + 1];
            y[i] = v * ih2;
        }
    }
    double eigenvalue_min() const override { return laplace_eig(M_, h_, 1); }
    double eigenvalue_max() const override { return laplace_eig(M_, h_, M_ - 1); }
    std::optional<std::pair<double, double>> tridiagonal_stencil() const override {
        return std::make_pair(2.0 / (h_ * h_), -1.0 / (h_ * h_));
    }

private:
    int M_;
    double h_;
};

// Second difference along one coordinate of the (M-1)x(M-1) interior grid,
// x1 index fastest.
class LaplaceAxis2D final : public LinearOperator {
public:
    LaplaceAxis2D(int M, double L, int axis) : M_(M), h_(L / M), axis_(axis) {}
    long size() const override { return static_cast<long>(M_ - 1) * (M_ - 1); }
    void apply(std::span<const double> x, std::span<double> y) const override {
        const long s = M_ - 1;
        const double ih2 = 1.0 / (h_ * h_);
        const long stride = (axis_ == 0) ? 1 : s;
        for (long i2 = 0; i2 < s; ++i2)
            for (long i1 = 0; i1 < s; ++i1) {
                const long idx = i1 + s * i2;
                const long along = (axis_ == 0) ? i1 : i2;
                double v = 2.0 * x[idx];
                if (along > 0) v -= x[idx - stride];
                if (along + 1 < s) v -= x[idx + stride];
                y[idx] = v * ih2;
            }
    }
    double eigenvalue_min() const override { return laplace_eig(M_, h_, 1); }
    double eigenvalue_max() const override { return laplace_eig(M_, h_, M_ - 1); }

private:
    int M_;
    double h_;
    int axis_;
};

class Laplace2D final : public LinearOperator {
public:
    Laplace2D(int M, double L) : ax0_(M, L, 0), ax1_(M, L, 1) {}
    long size() const override { return ax0_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const override {
        std::vector<double> tmp(x.size());
        ax0_.apply(x, tmp);
        ax1_.apply(x, y);
        for (size_t i = 0; i < y.size(); ++i) y[i] += tmp[i];
    }
    double eigenvalue_min() const override { return 2.0 * ax0_.eigenvalue_min(); }
    double eigenvalue_max() const override { return 2.0 * ax0_.eigenvalue_max(); }

private:
    LaplaceAxis2D ax0_, ax1_;
};

class ScalarOp final : public LinearOperator {
public:
    explicit ScalarOp(double a) : a_(a) {}
    long size() const override { return 1; }
    void apply(std::span<const double> x, std::span<double> y) const override { y[0] = a_ * x[0]; }
    double eigenvalue_min() const override { return a_; }
    double eigenvalue_max() const override { return a_; }
    std::optional<std::pair<double, double>> tridiagonal_stencil() const override {
        return std::make_pair(a_, 0.0);
    }

private:
    double a_;
};

} // namespace

double OperatorBundle::norm_weight() const {
    if (!grid) return 1.0;
    double w = grid->h();
    return grid->dim == 1 ? w : w * w;
}

OperatorBundle make_laplace_bundle_1d(const SpatialGrid& grid, int m) {
    if (grid.dim != 1) throw std::invalid_argument("bundle: grid must be one-dimensional");
    if (m < 1) throw std::invalid_argument("bundle: need at least one memory operator");
    auto lap = std::make_shared<Laplace1D>(grid.M, grid.L);
    OperatorBundle b;
    b.kind = BundleKind::Laplace1D;
    b.A = lap;
    b.B.assign(m, lap);
    b.grid = grid;
    return b;
}

OperatorBundle make_laplace_bundle_2d(const SpatialGrid& grid) {
    if (grid.dim != 2) throw std::invalid_argument("bundle: grid must be two-dimensional");
    OperatorBundle b;
    b.kind = BundleKind::Laplace2D;
    b.A = std::make_shared<Laplace2D>(grid.M, grid.L);
    b.B = {std::make_shared<LaplaceAxis2D>(grid.M, grid.L, 0),
           std::make_shared<LaplaceAxis2D>(grid.M, grid.L, 1)};
    b.grid = grid;
    return b;
}

OperatorBundle make_scalar_bundle(double a, std::vector<double> bs) {
    if (bs.empty()) throw std::invalid_argument("bundle: need at least one memory operator");
    OperatorBundle b;
    b.kind = BundleKind::Scalar;
    b.A = std::make_shared<ScalarOp>(a);
    for (double v : bs) b.B.push_back(std::make_shared<ScalarOp>(v));
    return b;
}

std::vector<double> apply_operator(const LinearOperator& op, std::span<const double> x) {
    if (static_cast<long>(x.size()) != op.size())
        throw std::invalid_argument("apply: dimension mismatch");
    std::vector<double> y(x.size());
    op.apply(x, y);
    return y;
}

namespace {

double definite_contribution(double c, const LinearOperator& op) {
    return c >= 0.0 ? c * op.eigenvalue_min() : c * op.eigenvalue_max();
}

void composite_apply(const OperatorBundle& bundle, double c0, double cA,
                     std::span<const double> cB, std::span<const double> x,
                     std::span<double> y, std::span<double> scratch) {
    bundle.A->apply(x, scratch);
    for (size_t i = 0; i < y.size(); ++i) y[i] = c0 * x[i] + cA * scratch[i];
    for (size_t j = 0; j < cB.size(); ++j) {
        if (cB[j] == 0.0) continue;
        bundle.B[j]->apply(x, scratch);
        for (size_t i = 0; i < y.size(); ++i) y[i] += cB[j] * scratch[i];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> solve_tridiagonal(double diag, double off, std::span<const double> rhs) {
    const long n = static_cast<long>(rhs.size());
    std::vector<double> c(n, 0.0), x(n, 0.0);
    double beta = diag;
    x[0] = rhs[0] / beta;
    for (long i = 1; i < n; ++i) {
        c[i] = off / beta;
        beta = diag - off * c[i];
        x[i] = (rhs[i] - off * x[i - 1]) / beta;
    }
    for (long i = n - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
    return x;
}

} // namespace

std::vector<double> solve_shifted(const OperatorBundle& bundle, double c0, double cA,
                                  std::span<const double> cB, std::span<const double> rhs,
                                  std::span<const double> x0) {
    const long n = bundle.size();
    if (static_cast<int>(cB.size()) != bundle.m())
        throw std::invalid_argument("solve_shifted: one shift per memory operator required");
    if (static_cast<long>(rhs.size()) != n)
        throw std::invalid_argument("solve_shifted: rhs dimension mismatch");
    if (!x0.empty() && static_cast<long>(x0.size()) != n)
        throw std::invalid_argument("solve_shifted: warm-start dimension mismatch");

    double bound = c0 + definite_contribution(cA, *bundle.A);
    for (size_t j = 0; j < cB.size(); ++j) bound += definite_contribution(cB[j], *bundle.B[j]);
    if (!(bound > 0.0)) {
        std::ostringstream msg;
        msg << "solve_shifted: composite not certifiably positive definite (c0=" << c0
            << ", cA=" << cA << ", definiteness bound=" << bound << ")";
        throw solver_error(msg.str());
    }

    // Direct path when every term carries a constant tridiagonal stencil.
    bool direct = true;
    double diag = c0, off = 0.0;
    if (auto st = bundle.A->tridiagonal_stencil()) {
        diag += cA * st->first;
        off += cA * st->second;
    } else {
        direct = false;
    }
    for (size_t j = 0; direct && j < cB.size(); ++j) {
        if (auto st = bundle.B[j]->tridiagonal_stencil()) {
            diag += cB[j] * st->first;
            off += cB[j] * st->second;
        } else {
            direct = false;
        }
    }
    if (direct) return solve_tridiagonal(diag, off, rhs);

    // Conjugate gradients on the matrix-free composite.
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    std::vector<double> x(n, 0.0);
    if (!x0.empty()) x.assign(x0.begin(), x0.end());
    if (rhs_norm == 0.0) return std::vector<double>(n, 0.0);

    const double tol = 1e-12 * rhs_norm;
    const long cap = 10 * n;
    std::vector<double> r(n), p(n), Ap(n), scratch(n);
    composite_apply(bundle, c0, cA, cB, x, Ap, scratch);
    for (long i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
    p = r;
    double rr = dot(r, r);
    for (long it = 0; it < cap; ++it) {
        if (std::sqrt(rr) <= tol) {
            // Recurrence residual can drift; accept only on the true residual.
            composite_apply(bundle, c0, cA, cB, x, Ap, scratch);
            for (long i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
            rr = dot(r, r);
            if (std::sqrt(rr) <= tol) return x;
            p = r;
        }
        composite_apply(bundle, c0, cA, cB, p, Ap, scratch);
        const double alpha = rr / dot(p, Ap);
        for (long i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (long i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        const double rr_new = dot(r, r);
        for (long i = 0; i < n; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
    }
    composite_apply(bundle, c0, cA, cB, x, Ap, scratch);
    for (long i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
    if (std::sqrt(dot(r, r)) <= tol) return x;
    throw solver_error("solve_shifted: conjugate gradients exceeded the iteration cap");
}

} // namespace cnpi

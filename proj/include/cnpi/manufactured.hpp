#pragma once

#include <span>
#include <vector>

#include "cnpi/operators.hpp"
#include "cnpi/quadrature.hpp"

namespace cnpi {

// Integral of the singular kernel against a power:
// int_0^t (t-s)^(alpha-1)/Gamma(alpha) s^mu ds = Gamma(mu+1)/Gamma(mu+1+alpha) t^(mu+alpha).
double frac_int_power(double alpha, double mu, double t);

// sum_i c_i t^(mu_i); closed under differentiation and fractional integration,
// which is all the built-in exact solutions need.
struct PowerSum {
    std::vector<double> coeff;
    std::vector<double> mu;

    double value(double t) const;
    double deriv(double t) const;
    double frac_integral(double alpha, double t) const;
};

enum class CaseId { Sine1D, Sine2D };

// Exact solution u = w(t) e^(-kappa t) phi(x) with phi an eigenfunction of all
// operators, plus the matching source.  g_factor carries the transformed
// source's time dependence: g(x,t) = e^(kappa t) f(x,t) = phi(x) g_factor(t).
struct ManufacturedCase {
    CaseId id = CaseId::Sine1D;
    KernelSpec kernel;
    double L = 1.0;
    PowerSum w;
    double lambda_A = 0.0;
    std::vector<double> lambda_B;

    int dim() const { return id == CaseId::Sine1D ? 1 : 2; }
    double profile(std::span<const double> x) const;
    double exact_u(std::span<const double> x, double t) const;
    double u0_at(std::span<const double> x) const;
    double f(std::span<const double> x, double t) const;
    double g_factor(double t) const;
};

// u = (t^(1+alpha1) + t^(1+alpha2)) e^(-kappa t) sin(pi x / L) on (0,L),
// A = B_1 = B_2 = -d^2/dx^2, u0 = 0.
ManufacturedCase make_sine_case_1d(const std::vector<double>& alphas, double kappa, double L = 1.0);

// u = (t^(1+min(alpha)) + 1) e^(-kappa t) sin(pi x1/L) sin(pi x2/L) on (0,L)^2,
// A = -Laplace, B_j = -d^2/dx_j^2, u0 = the product-sine profile.
ManufacturedCase make_sine_case_2d(const std::vector<double>& alphas, double kappa, double L = 1.0);

// Profile sampled at the interior points of the grid (x1 index fastest in 2D).
std::vector<double> sample_profile(const ManufacturedCase& mcase, const SpatialGrid& grid);

std::vector<double> sample_exact(const ManufacturedCase& mcase, const SpatialGrid& grid, double t);

} // namespace cnpi

#include "cnpi/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cnpi {

double frac_int_power(double alpha, double mu, double t) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("frac_int_power: alpha must lie in (0,1)");
    if (!(mu > -1.0)) throw std::domain_error("frac_int_power: mu must exceed -1");
    if (t < 0.0) throw std::domain_error("frac_int_power: t must be >= 0");
    if (t == 0.0) return 0.0;
    return gamma_function(mu + 1.0) / gamma_function(mu + 1.0 + alpha) * std::pow(t, mu + alpha);
}

double PowerSum::value(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < coeff.size(); ++i)
        s += coeff[i] * (mu[i] == 0.0 ? 1.0 : std::pow(t, mu[i]));
    return s;
}

double PowerSum::deriv(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < coeff.size(); ++i) {
        if (mu[i] == 0.0) continue;
        if (t == 0.0) {
            if (mu[i] == 1.0) s += coeff[i];
            else if (mu[i] < 1.0)
                throw std::domain_error("PowerSum::deriv: singular at t=0");
            continue;
        }
        s += coeff[i] * mu[i] * std::pow(t, mu[i] - 1.0);
    }
    return s;
}

double PowerSum::frac_integral(double alpha, double t) const {
    double s = 0.0;
    for (size_t i = 0; i < coeff.size(); ++i) s += coeff[i] * frac_int_power(alpha, mu[i], t);
    return s;
}

double ManufacturedCase::profile(std::span<const double> x) const {
    const double pl = std::numbers::pi / L;
    if (id == CaseId::Sine1D) return std::sin(pl * x[0]);
    return std::sin(pl * x[0]) * std::sin(pl * x[1]);
}

double ManufacturedCase::exact_u(std::span<const double> x, double t) const {
    return w.value(t) * std::exp(-kernel.kappa * t) * profile(x);
}

double ManufacturedCase::u0_at(std::span<const double> x) const { return exact_u(x, 0.0); }

double ManufacturedCase::g_factor(double t) const {
    double s = w.deriv(t) + (lambda_A - kernel.kappa) * w.value(t);
    for (size_t j = 0; j < lambda_B.size(); ++j)
        s += lambda_B[j] * w.frac_integral(kernel.alphas[j], t);
    return s;
}

double ManufacturedCase::f(std::span<const double> x, double t) const {
    return std::exp(-kernel.kappa * t) * profile(x) * g_factor(t);
}

ManufacturedCase make_sine_case_1d(const std::vector<double>& alphas, double kappa, double L) {
    if (alphas.size() != 2)
        throw std::invalid_argument("sine case: exactly two kernel exponents expected");
    if (!(L > 0.0)) throw std::invalid_argument("sine case: L must be > 0");
    const double lam = std::numbers::pi * std::numbers::pi / (L * L);
    ManufacturedCase c{CaseId::Sine1D, KernelSpec(alphas, kappa), L,
                       PowerSum{{1.0, 1.0}, {1.0 + alphas[0], 1.0 + alphas[1]}},
                       lam, {lam, lam}};
    return c;
}

ManufacturedCase make_sine_case_2d(const std::vector<double>& alphas, double kappa, double L) {
    if (alphas.size() != 2)
        throw std::invalid_argument("sine case: exactly two kernel exponents expected");
    if (!(L > 0.0)) throw std::invalid_argument("sine case: L must be > 0");
    const double lam = std::numbers::pi * std::numbers::pi / (L * L);
    KernelSpec kernel(alphas, kappa);
    ManufacturedCase c{CaseId::Sine2D, kernel, L,
                       PowerSum{{1.0, 1.0}, {1.0 + kernel.alpha_min(), 0.0}},
                       2.0 * lam, {lam, lam}};
    return c;
}

std::vector<double> sample_profile(const ManufacturedCase& mcase, const SpatialGrid& grid) {
    if (grid.dim != mcase.dim())
        throw std::invalid_argument("sample_profile: grid dimension mismatch");
    const double h = grid.h();
    const long s = grid.M - 1;
    std::vector<double> out(grid.interior_count());
    if (grid.dim == 1) {
        for (long i = 0; i < s; ++i) {
            // Padded so profile's (dead) 2D branch stays in bounds under inlining.
            const double x[2] = {(i + 1) * h, 0.0};
            out[i] = mcase.profile(std::span<const double>(x, 1));
        }
    } else {
        for (long i2 = 0; i2 < s; ++i2)
            for (long i1 = 0; i1 < s; ++i1) {
                const double x[2] = {(i1 + 1) * h, (i2 + 1) * h};
                out[i1 + s * i2] = mcase.profile(x);
            }
    }
    return out;
}

std::vector<double> sample_exact(const ManufacturedCase& mcase, const SpatialGrid& grid,
                                 double t) {
    std::vector<double> out = sample_profile(mcase, grid);
    const double scale = mcase.w.value(t) * std::exp(-mcase.kernel.kappa * t);
    for (double& x : out) x *= scale;
    return out;
}

} // namespace cnpi

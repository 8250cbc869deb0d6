#include "cnpi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cnpi {

KernelSpec::KernelSpec(std::vector<double> alphas_, double kappa_)
    : alphas(std::move(alphas_)), kappa(kappa_) {
    if (alphas.empty()) throw std::invalid_argument("kernel: need at least one exponent");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("kernel: exponents must lie in (0,1)");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kernel: kappa must be >= 0");
}

double KernelSpec::alpha_min() const {
    double m = alphas[0];
    for (double a : alphas) m = std::min(m, a);
    return m;
}

double gamma_function(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_function: x must be > 0");
    if (x > 50.0) throw std::domain_error("gamma_function: supported domain is (0, 50]");
    if (x < 0.5)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_function(1.0 - x));

    static const double p[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,       -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

    const double z = x - 1.0;
    double a = p[0];
    for (int i = 1; i < 9; ++i) a += p[i] / (z + i);
    const double s = z + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(s, z + 0.5) * std::exp(-s) * a;
}

double tempered_kernel(double alpha, double kappa, double t) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("tempered_kernel: alpha must lie in (0,1)");
    if (!(kappa >= 0.0)) throw std::invalid_argument("tempered_kernel: kappa must be >= 0");
    if (!(t > 0.0)) throw std::domain_error("tempered_kernel: singular at t <= 0");
    return std::exp(-kappa * t) * std::pow(t, alpha - 1.0) / gamma_function(alpha);
}

namespace {

// a^e - b^e for a >= b >= 0.  When the powers share leading digits the direct
// subtraction cancels; b^e expm1(e ln(a/b)) keeps full relative accuracy.
double pow_diff(double a, double b, double e) {
    if (b == 0.0) return std::pow(a, e);
    if (a <= 1.5 * b) return std::pow(b, e) * std::expm1(e * std::log(a / b));
    return std::pow(a, e) - std::pow(b, e);
}

void check_indices(const GradedMesh& mesh, int n, int p) {
    if (n < 1 || n > mesh.N || p < 1 || p > n)
        throw std::out_of_range("pi_weight: need 1 <= p <= n <= N");
}

} // namespace

double pi_weight(const GradedMesh& mesh, double alpha, int n, int p) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("pi_weight: alpha must lie in (0,1)");
    check_indices(mesh, n, p);
    const double gae = gamma_function(alpha + 2.0);
    if (p == n) return std::pow(mesh.k[n], alpha - 1.0) / gae;

    // lambda_{n,p} - lambda_{n-1,p} regrouped along the n-direction so each
    // difference is a pow_diff of arguments separated by one step.
    const double e = alpha + 1.0;
    const auto& t = mesh.t;
    const double left = pow_diff(t[n] - t[p - 1], t[n - 1] - t[p - 1], e);
    const double right = pow_diff(t[n] - t[p], t[n - 1] - t[p], e);
    return (left - right) / (mesh.k[n] * mesh.k[p] * gae);
}

PIWeightRow pi_weight_row(const GradedMesh& mesh, double alpha, int n) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("pi_weight_row: alpha must lie in (0,1)");
    check_indices(mesh, n, 1);
    PIWeightRow row;
    row.n = n;
    row.alpha = alpha;
    row.w.resize(static_cast<size_t>(n) + 1);
    row.w[0] = 0.0;
    for (int p = 1; p <= n; ++p) row.w[p] = pi_weight(mesh, alpha, n, p);
    return row;
}

std::vector<PIWeightRow> pi_weight_table(const GradedMesh& mesh, double alpha) {
    std::vector<PIWeightRow> table(static_cast<size_t>(mesh.N) + 1);
    for (int n = 1; n <= mesh.N; ++n) table[n] = pi_weight_row(mesh, alpha, n);
    return table;
}

std::vector<double> discrete_fractional_integral(const PIWeightRow& row,
                                                 const GradedMesh& mesh,
                                                 std::span<const std::vector<double>> history) {
    const int n = row.n;
    if (static_cast<int>(history.size()) != n + 1)
        throw std::invalid_argument("discrete_fractional_integral: history must hold slots 0..n");
    const size_t dim = history[1].size();
    for (int p = 1; p <= n; ++p)
        if (history[p].size() != dim)
            throw std::invalid_argument("discrete_fractional_integral: ragged history");

    std::vector<double> out(dim, 0.0);
    for (int p = 1; p <= n; ++p) {
        const double c = row.w[p] * mesh.k[p];
        const auto& h = history[p];
        for (size_t i = 0; i < dim; ++i) out[i] += c * h[i];
    }
    return out;
}

} // namespace cnpi

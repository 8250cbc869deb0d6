#pragma once

#include <span>
#include <vector>

#include "cnpi/mesh.hpp"

namespace cnpi {

// Family of weakly singular memory kernels e^(-kappa*t) t^(alpha_j - 1) / Gamma(alpha_j),
// alpha_j in (0,1), kappa >= 0.
struct KernelSpec {
    std::vector<double> alphas;
    double kappa = 0.0;

    KernelSpec(std::vector<double> alphas_, double kappa_);
    int m() const { return static_cast<int>(alphas.size()); }
    double alpha_min() const;
};

// Product-integration weights w_{np} of one kernel at step n; w[0] is unused
// padding so that w[p] matches the 1-based history index p = 1..n.
struct PIWeightRow {
    int n = 0;
    double alpha = 0.0;
    std::vector<double> w;
};

// Lanczos evaluation, supported on (0, 50], relative error <= 1e-13.
double gamma_function(double x);

double tempered_kernel(double alpha, double kappa, double t);

double pi_weight(const GradedMesh& mesh, double alpha, int n, int p);

PIWeightRow pi_weight_row(const GradedMesh& mesh, double alpha, int n);

// Full O(N^2) table, rows n = 1..N (index 0 is an empty placeholder row).
// Exists for cross-checks; the stepper generates rows on demand.
std::vector<PIWeightRow> pi_weight_table(const GradedMesh& mesh, double alpha);

// Quadrature of the memory convolution averaged over step n against a
// piecewise-constant history: history[1] is the full first-step value V^1,
// history[p] for p >= 2 the half-step average V^{p-1/2}; history[0] is ignored
// padding. Returns w[1] k_1 history[1] + sum_{p=2}^n w[p] k_p history[p].
std::vector<double> discrete_fractional_integral(const PIWeightRow& row,
                                                 const GradedMesh& mesh,
                                                 std::span<const std::vector<double>> history);

} // namespace cnpi

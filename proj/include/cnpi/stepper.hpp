#pragma once

#include <functional>
#include <vector>

#include "cnpi/mesh.hpp"
#include "cnpi/operators.hpp"
#include "cnpi/quadrature.hpp"

namespace cnpi {

enum class SourceRule { Midpoint, EndpointAverage };

// The problem advanced by the scheme, already in the tempered variable
// v(t) = e^(kappa t) u(t): v' + A v + sum_j (w_{alpha_j} * B_j v) - kappa v = g,
// with g(t) = e^(kappa t) f(t) supplied directly to avoid overflow.
struct ProblemSpec {
    KernelSpec kernel;
    OperatorBundle bundle;
    GradedMesh mesh;
    std::function<std::vector<double>(double)> g; // transformed source at time t
    std::vector<double> u0;
    SourceRule source_rule = SourceRule::Midpoint;
};

// Rejects inconsistent dimensions, kernel/operator count mismatch, and
// kappa*T > 30 (where the e^(kappa t) map would overwhelm double range).
void validate_problem(const ProblemSpec& spec);

struct SchemeState {
    int n = 0;
    std::vector<std::vector<double>> V;    // V[0..n]
    std::vector<std::vector<double>> Vbar; // Vbar[1] = V[1], Vbar[p>=2] = (V[p]+V[p-1])/2
    std::vector<double> energy_terms;      // prefix sums of k_s |Vtilde^s|^2, index 0..n
    double norm_weight = 1.0;
};

SchemeState init_state(const ProblemSpec& spec);

std::vector<double> source_average(const ProblemSpec& spec, int n);

// Advance 0 -> 1.  The first step treats A and the reaction term implicitly at
// the new level and the memory term through the single weight w_11.
void step_first(const ProblemSpec& spec, SchemeState& state);

// Advance n-1 -> n (n >= 2): Crank-Nicolson in A and the reaction term, the
// memory term through the weight row at n with all history on the right.
void step_n(const ProblemSpec& spec, SchemeState& state);

SchemeState run(const ProblemSpec& spec);

// Map back to the physical variable: U^n = e^(-kappa t_n) V^n, n = 0..state.n.
std::vector<std::vector<double>> to_physical(const SchemeState& state, const GradedMesh& mesh,
                                             double kappa);

// E^n = |V^n|^2 - 2 kappa sum_{s<=n} k_s |Vtilde^s|^2 in the discrete grid norm,
// with Vtilde^1 = V^1 and Vtilde^s = (V^s + V^{s-1})/2 for s >= 2.
double energy(const SchemeState& state, const GradedMesh& mesh, double kappa, int n);

} // namespace cnpi

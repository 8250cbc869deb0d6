#include "cnpi/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace cnpi {

namespace {

double norm_sq(const std::vector<double>& v, double weight) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return weight * s;
}

} // namespace

void validate_problem(const ProblemSpec& spec) {
    if (spec.kernel.m() != spec.bundle.m())
        throw std::invalid_argument("problem: one kernel exponent per memory operator required");
    if (static_cast<long>(spec.u0.size()) != spec.bundle.size())
        throw std::invalid_argument("problem: u0 dimension mismatch");
    if (!spec.g) throw std::invalid_argument("problem: missing source callable");
    if (spec.mesh.N < 1) throw std::invalid_argument("problem: empty mesh");
    if (spec.kernel.kappa * spec.mesh.T > 30.0)
        throw std::invalid_argument("problem: kappa*T > 30 exceeds the tempering range");
}

SchemeState init_state(const ProblemSpec& spec) {
    SchemeState state;
    state.n = 0;
    state.V.reserve(static_cast<size_t>(spec.mesh.N) + 1);
    state.Vbar.reserve(static_cast<size_t>(spec.mesh.N) + 1);
    state.V.push_back(spec.u0);
    state.Vbar.push_back({}); // slot 0 unused
    state.energy_terms.reserve(static_cast<size_t>(spec.mesh.N) + 1);
    state.energy_terms.push_back(0.0);
    state.norm_weight = spec.bundle.norm_weight();
    return state;
}

std::vector<double> source_average(const ProblemSpec& spec, int n) {
    if (n < 1 || n > spec.mesh.N) throw std::out_of_range("source_average: bad step index");
    const double t0 = spec.mesh.t[n - 1];
    const double t1 = spec.mesh.t[n];
    if (spec.source_rule == SourceRule::Midpoint) return spec.g(0.5 * (t0 + t1));
    std::vector<double> a = spec.g(t0);
    const std::vector<double> b = spec.g(t1);
    for (size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
    return a;
}

void step_first(const ProblemSpec& spec, SchemeState& state) {
    if (state.n != 0) throw std::invalid_argument("step_first: state must be at n=0");
    const double k1 = spec.mesh.k[1];
    const double kappa = spec.kernel.kappa;
    const int m = spec.kernel.m();

    std::vector<double> cB(m);
    for (int j = 0; j < m; ++j)
        cB[j] = pi_weight(spec.mesh, spec.kernel.alphas[j], 1, 1) * k1;

    std::vector<double> rhs = source_average(spec, 1);
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += state.V[0][i] / k1;

    std::vector<double> v1 =
        solve_shifted(spec.bundle, 1.0 / k1 - kappa, 1.0, cB, rhs, state.V[0]);
    state.Vbar.push_back(v1);
    state.energy_terms.push_back(state.energy_terms.back() + k1 * norm_sq(v1, state.norm_weight));
    state.V.push_back(std::move(v1));
    state.n = 1;
}

void step_n(const ProblemSpec& spec, SchemeState& state) {
    const int n = state.n + 1;
    if (n < 2) throw std::invalid_argument("step_n: first step must precede");
    if (n > spec.mesh.N) throw std::out_of_range("step_n: mesh exhausted");
    const double kn = spec.mesh.k[n];
    const double kappa = spec.kernel.kappa;
    const int m = spec.kernel.m();
    const long dim = spec.bundle.size();
    const std::vector<double>& vprev = state.V[n - 1];

    std::vector<double> rhs = source_average(spec, n);
    {
        std::vector<double> Av(dim);
        spec.bundle.A->apply(vprev, Av);
        const double c = 1.0 / kn + 0.5 * kappa;
        for (long i = 0; i < dim; ++i) rhs[i] += c * vprev[i] - 0.5 * Av[i];
    }

    // Memory: everything known is combined per kernel, then B_j applied once.
    std::vector<double> cB(m);
    std::vector<double> hist(dim), Bh(dim);
    for (int j = 0; j < m; ++j) {
        const PIWeightRow row = pi_weight_row(spec.mesh, spec.kernel.alphas[j], n);
        cB[j] = 0.5 * row.w[n] * kn;
        const double w1 = row.w[1] * spec.mesh.k[1];
        for (long i = 0; i < dim; ++i) hist[i] = w1 * state.Vbar[1][i];
        for (int p = 2; p <= n - 1; ++p) {
            const double wp = row.w[p] * spec.mesh.k[p];
            const std::vector<double>& vb = state.Vbar[p];
            for (long i = 0; i < dim; ++i) hist[i] += wp * vb[i];
        }
        for (long i = 0; i < dim; ++i) hist[i] += cB[j] * vprev[i];
        spec.bundle.B[j]->apply(hist, Bh);
        for (long i = 0; i < dim; ++i) rhs[i] -= Bh[i];
    }

    std::vector<double> vn =
        solve_shifted(spec.bundle, 1.0 / kn - 0.5 * kappa, 0.5, cB, rhs, vprev);
    std::vector<double> vbar(dim);
    for (long i = 0; i < dim; ++i) vbar[i] = 0.5 * (vn[i] + vprev[i]);
    state.energy_terms.push_back(state.energy_terms.back() +
                                 kn * norm_sq(vbar, state.norm_weight));
    state.Vbar.push_back(std::move(vbar));
    state.V.push_back(std::move(vn));
    state.n = n;
}

SchemeState run(const ProblemSpec& spec) {
    validate_problem(spec);
    SchemeState state = init_state(spec);
    step_first(spec, state);
    for (int n = 2; n <= spec.mesh.N; ++n) step_n(spec, state);
    return state;
}

std::vector<std::vector<double>> to_physical(const SchemeState& state, const GradedMesh& mesh,
                                             double kappa) {
    std::vector<std::vector<double>> U(state.V.begin(), state.V.end());
    for (int n = 0; n <= state.n; ++n) {
        const double damp = std::exp(-kappa * mesh.t[n]);
        for (double& x : U[n]) x *= damp;
    }
    return U;
}

double energy(const SchemeState& state, const GradedMesh&, double kappa, int n) {
    if (n < 0 || n > state.n) throw std::out_of_range("energy: step index out of range");
    return norm_sq(state.V[n], state.norm_weight) - 2.0 * kappa * state.energy_terms[n];
}

} // namespace cnpi

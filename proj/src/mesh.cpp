#include "cnpi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cnpi {

namespace {

// Evaluate (n*kb)^gamma in extended precision; exp(gamma*ln(.)) rather than
// pow-of-pow keeps the sequence monotone at the working precision.
long double level_value(int n, long double kb, double gamma) {
    if (n == 0) return 0.0L;
    if (gamma == 1.0) return n * kb;
    return expl(static_cast<long double>(gamma) * logl(n * kb));
}

} // namespace

GradedMesh build_graded_mesh(int N, double gamma, double T) {
    if (N < 1) throw std::invalid_argument("mesh: N must be >= 1");
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
        throw std::invalid_argument("mesh: gamma must be >= 1");
    if (!(T > 0.0) || !std::isnormal(T))
        throw std::invalid_argument("mesh: T must be positive and normal");

    // All levels are built as integer multiples of q = ulp(T).  This makes
    // t[N] = T, k[n] = t[n]-t[n-1], and the nondecreasing-step property hold
    // bitwise instead of only up to rounding.
    int exp2t = 0;
    std::frexp(T, &exp2t);
    const double q = std::ldexp(1.0, exp2t - 53);
    const std::int64_t total = std::llround(T / q); // exact: T is a multiple of q

    const long double kb =
        (gamma == 1.0) ? static_cast<long double>(T) / N
                       : expl(logl(static_cast<long double>(T)) / gamma) / N;

    std::vector<std::int64_t> quanta(static_cast<size_t>(N) + 1, 0);
    long double prev = 0.0L;
    long double prev_step = 0.0L;
    for (int n = 1; n <= N; ++n) {
        long double tn = level_value(n, kb, gamma);
        long double step = std::max(tn - prev, prev_step); // analytic steps are nondecreasing
        prev_step = step;
        prev = tn;
        quanta[n] = std::max<std::int64_t>(1, llroundl(step / q));
        if (n > 1) quanta[n] = std::max(quanta[n], quanta[n - 1]);
    }

    std::int64_t defect = total;
    for (int n = 1; n <= N; ++n) defect -= quanta[n];
    while (defect > 0) { // lengthen the largest steps, one quantum each
        for (int n = N; n >= 1 && defect > 0; --n) {
            ++quanta[n];
            --defect;
        }
    }
    while (defect < 0) { // shorten the smallest steps where order and positivity allow
        bool changed = false;
        for (int n = 1; n <= N && defect < 0; ++n) {
            const std::int64_t floor_n = (n > 1) ? quanta[n - 1] : 1;
            if (quanta[n] - 1 >= floor_n) {
                --quanta[n];
                ++defect;
                changed = true;
            }
        }
        if (!changed)
            throw std::invalid_argument("mesh: T too small to resolve N steps");
    }

    GradedMesh mesh;
    mesh.N = N;
    mesh.gamma = gamma;
    mesh.T = T;
    mesh.k_base = static_cast<double>(kb);
    mesh.t.resize(static_cast<size_t>(N) + 1);
    mesh.k.resize(static_cast<size_t>(N) + 1);
    mesh.t[0] = 0.0;
    mesh.k[0] = 0.0;
    std::int64_t acc = 0;
    for (int n = 1; n <= N; ++n) {
        acc += quanta[n];
        mesh.t[n] = static_cast<double>(acc) * q;
        mesh.k[n] = static_cast<double>(quanta[n]) * q;
    }
    return mesh;
}

GradedMesh make_mesh_from_points(std::vector<double> t, double gamma) {
    if (t.size() < 2) throw std::invalid_argument("mesh: need at least two levels");
    if (t.front() != 0.0) throw std::invalid_argument("mesh: t[0] must be 0");
    if (!(gamma >= 1.0)) throw std::invalid_argument("mesh: gamma must be >= 1");
    for (size_t n = 1; n < t.size(); ++n)
        if (!(t[n] > t[n - 1]))
            throw std::invalid_argument("mesh: levels must be strictly increasing");

    GradedMesh mesh;
    mesh.N = static_cast<int>(t.size()) - 1;
    mesh.gamma = gamma;
    mesh.T = t.back();
    mesh.k_base = std::pow(mesh.T, 1.0 / gamma) / mesh.N;
    mesh.k.resize(t.size());
    mesh.k[0] = 0.0;
    for (size_t n = 1; n < t.size(); ++n) mesh.k[n] = t[n] - t[n - 1];
    mesh.t = std::move(t);
    return mesh;
}

MeshHypothesisReport validate_mesh_hypotheses(const GradedMesh& mesh) {
    const int N = mesh.N;
    const double g = mesh.gamma;
    const double kb = mesh.k_base;
    MeshHypothesisReport rep;

    const double kb_gamma = std::pow(kb, g);
    rep.first_step_constant = mesh.t[1] / kb_gamma;
    rep.first_step_ok = std::isfinite(rep.first_step_constant) && rep.first_step_constant > 0.0;

    double c_step = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double cap = std::min(1.0, std::pow(mesh.t[n], 1.0 - 1.0 / g));
        c_step = std::max(c_step, mesh.k[n] / (kb * cap));
    }
    rep.step_bound_constant = c_step;
    rep.step_bound_ok = std::isfinite(c_step);

    double c_ratio = 0.0;
    for (int n = 2; n <= N; ++n) c_ratio = std::max(c_ratio, mesh.t[n] / mesh.t[n - 1]);
    rep.level_ratio_constant = c_ratio;
    rep.level_ratio_ok = std::isfinite(c_ratio);

    rep.increment_monotone = true;
    double c_incr = 0.0;
    for (int n = 2; n < N; ++n) {
        const double d = mesh.k[n + 1] - mesh.k[n];
        if (d < 0.0) {
            rep.increment_monotone = false;
            continue;
        }
        const double cap = std::min(1.0, std::pow(mesh.t[n], 1.0 - 2.0 / g));
        c_incr = std::max(c_incr, d / (kb * kb * cap));
    }
    rep.increment_bound_constant =
        rep.increment_monotone ? c_incr : std::numeric_limits<double>::quiet_NaN();
    rep.increment_ok = rep.increment_monotone && std::isfinite(rep.increment_bound_constant);
    return rep;
}

} // namespace cnpi

#pragma once

#include <vector>

namespace cnpi {

// Graded time partition t_n = (n*k_base)^gamma on [0,T], k_base = T^(1/gamma)/N.
// Arrays are 1-based in n: t has N+1 entries (t[0]=0), k has N+1 entries with
// k[0]=0 unused and k[n] = t[n]-t[n-1] for n=1..N.
struct GradedMesh {
    int N = 0;
    double gamma = 1.0;
    double T = 1.0;
    double k_base = 0.0;
    std::vector<double> t;
    std::vector<double> k;
};

// Tightest constants realizing the step-size hypotheses a graded mesh must
// satisfy, found by direct scan:
//   first_step_constant:     largest  c with t_1 >= c * k_base^gamma
//   step_bound_constant:     smallest C with k_n <= C * k_base * min(1, t_n^(1-1/gamma))
//   level_ratio_constant:    smallest C with t_n <= C * t_{n-1}        (n >= 2)
//   increment_bound_constant:smallest C with 0 <= k_{n+1}-k_n <= C * k_base^2 * min(1, t_n^(1-2/gamma))  (n >= 2)
struct MeshHypothesisReport {
    double first_step_constant = 0.0;
    double step_bound_constant = 0.0;
    double level_ratio_constant = 0.0;
    double increment_bound_constant = 0.0;
    bool first_step_ok = false;
    bool step_bound_ok = false;
    bool level_ratio_ok = false;
    bool increment_monotone = false;
    bool increment_ok = false;

    bool all_satisfied() const {
        return first_step_ok && step_bound_ok && level_ratio_ok && increment_ok;
    }
};

GradedMesh build_graded_mesh(int N, double gamma, double T);

// Wrap an arbitrary strictly increasing partition (t[0]=0) in the same type;
// gamma is the exponent the hypothesis scan should be evaluated against.
GradedMesh make_mesh_from_points(std::vector<double> t, double gamma);

MeshHypothesisReport validate_mesh_hypotheses(const GradedMesh& mesh);

} // namespace cnpi

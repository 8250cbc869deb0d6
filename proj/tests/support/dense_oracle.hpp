#pragma once

// Test-local reference solver. Instead of stepping, it assembles the whole
// time-coupled system for (V^1, ..., V^N) as one dense (N*d) x (N*d) matrix
// (memory weights from the literal power formula with naive pow/tgamma) and
// solves it by partial-pivot LU. Shares no code with the library under test.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double pi_weight_naive(const std::vector<double>& t, double alpha, int n, int p) {
    const double g2 = std::tgamma(alpha + 2.0);
    const double kn = t[n] - t[n - 1];
    if (p == n) return std::pow(kn, alpha - 1.0) / g2;
    const double kp = t[p] - t[p - 1];
    const double e = alpha + 1.0;
    const double lam_n = std::pow(t[n] - t[p - 1], e) - std::pow(t[n] - t[p], e);
    const double lam_prev = std::pow(t[n - 1] - t[p - 1], e) - std::pow(t[n - 1] - t[p], e);
    return (lam_n - lam_prev) / (kn * kp * g2);
}

struct DenseProblem {
    std::vector<double> t; // node times, t[0] = 0
    std::vector<double> alphas;
    double kappa = 0.0;
    std::vector<double> A;              // d*d row-major
    std::vector<std::vector<double>> B; // one d*d block per kernel
    std::vector<double> u0;
    std::function<std::vector<double>(double)> g;
    bool endpoint_average = false;
};

namespace detail {

inline void lu_solve(std::vector<double>& M, std::vector<double>& rhs, int n) {
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r * n + col]) > std::abs(M[best * n + col])) best = r;
        if (M[best * n + col] == 0.0) throw std::runtime_error("dense oracle: singular system");
        if (best != col) {
            for (int c = 0; c < n; ++c) std::swap(M[col * n + c], M[best * n + c]);
            std::swap(rhs[col], rhs[best]);
        }
        const double pivot = M[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double factor = M[r * n + col] / pivot;
            if (factor == 0.0) continue;
            M[r * n + col] = 0.0;
            for (int c = col + 1; c < n; ++c) M[r * n + c] -= factor * M[col * n + c];
            rhs[r] -= factor * rhs[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= M[r * n + c] * rhs[c];
        rhs[r] = acc / M[r * n + r];
    }
}

} // namespace detail

// Returns V^1..V^N (result[0] is V^1).
inline std::vector<std::vector<double>> dense_solve(const DenseProblem& prob) {
    const int N = static_cast<int>(prob.t.size()) - 1;
    const int d = static_cast<int>(prob.u0.size());
    const int m = static_cast<int>(prob.alphas.size());
    const int dim = N * d;
    std::vector<double> M(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> rhs(dim, 0.0);

    auto block_add = [&](int row_n, int col_n, const std::vector<double>& op, double scale) {
        const int r0 = (row_n - 1) * d, c0 = (col_n - 1) * d;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                M[(r0 + r) * static_cast<std::size_t>(dim) + (c0 + c)] +=
                    scale * op[r * d + c];
    };
    auto diag_add = [&](int row_n, int col_n, double scale) {
        const int r0 = (row_n - 1) * d, c0 = (col_n - 1) * d;
        for (int r = 0; r < d; ++r)
            M[(r0 + r) * static_cast<std::size_t>(dim) + (c0 + r)] += scale;
    };
    auto source = [&](int n) {
        if (prob.endpoint_average) {
            std::vector<double> ga = prob.g(prob.t[n - 1]);
            const std::vector<double> gb = prob.g(prob.t[n]);
            for (int i = 0; i < d; ++i) ga[i] = 0.5 * (ga[i] + gb[i]);
            return ga;
        }
        return prob.g(0.5 * (prob.t[n - 1] + prob.t[n]));
    };

    const double k1 = prob.t[1] - prob.t[0];
    diag_add(1, 1, 1.0 / k1 - prob.kappa);
    block_add(1, 1, prob.A, 1.0);
    for (int j = 0; j < m; ++j)
        block_add(1, 1, prob.B[j], pi_weight_naive(prob.t, prob.alphas[j], 1, 1) * k1);
    {
        const std::vector<double> g1 = source(1);
        for (int i = 0; i < d; ++i) rhs[i] = g1[i] + prob.u0[i] / k1;
    }

    for (int n = 2; n <= N; ++n) {
        const double kn = prob.t[n] - prob.t[n - 1];
        diag_add(n, n, 1.0 / kn - 0.5 * prob.kappa);
        block_add(n, n, prob.A, 0.5);
        diag_add(n, n - 1, -(1.0 / kn + 0.5 * prob.kappa));
        block_add(n, n - 1, prob.A, 0.5);
        for (int j = 0; j < m; ++j) {
            const double alpha = prob.alphas[j];
            const double w_n1 = pi_weight_naive(prob.t, alpha, n, 1);
            block_add(n, 1, prob.B[j], w_n1 * k1);
            for (int p = 2; p <= n - 1; ++p) {
                const double kp = prob.t[p] - prob.t[p - 1];
                const double half = 0.5 * pi_weight_naive(prob.t, alpha, n, p) * kp;
                block_add(n, p, prob.B[j], half);
                block_add(n, p - 1, prob.B[j], half);
            }
            const double half_nn = 0.5 * pi_weight_naive(prob.t, alpha, n, n) * kn;
            block_add(n, n, prob.B[j], half_nn);
            block_add(n, n - 1, prob.B[j], half_nn);
        }
        const std::vector<double> gn = source(n);
        for (int i = 0; i < d; ++i) rhs[(n - 1) * d + i] = gn[i];
    }

    detail::lu_solve(M, rhs, dim);

    std::vector<std::vector<double>> V(N);
    for (int n = 1; n <= N; ++n)
        V[n - 1].assign(rhs.begin() + (n - 1) * d, rhs.begin() + n * d);
    return V;
}

} // namespace oracle

#include "cnpi/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cnpi {

double resolve_gamma(GammaRule rule, double explicit_value, double alpha_min) {
    switch (rule) {
        case GammaRule::Uniform: return 1.0;
        case GammaRule::Optimal: return 2.0 / (1.0 + alpha_min);
        case GammaRule::OptimalPlusOne: return 2.0 / (1.0 + alpha_min) + 1.0;
        case GammaRule::Explicit:
            if (!(explicit_value >= 1.0))
                throw std::invalid_argument("gamma: explicit value must be >= 1");
            return explicit_value;
    }
    throw std::invalid_argument("gamma: unknown rule");
}

namespace {

const char* gamma_rule_name(GammaRule rule) {
    switch (rule) {
        case GammaRule::Uniform: return "uniform";
        case GammaRule::Optimal: return "optimal";
        case GammaRule::OptimalPlusOne: return "optimal+1";
        case GammaRule::Explicit: return "explicit";
    }
    return "?";
}

const char* source_rule_name(SourceRule rule) {
    return rule == SourceRule::Midpoint ? "midpoint" : "average";
}

const char* example_name(CaseId id) { return id == CaseId::Sine1D ? "1" : "2"; }

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", x);
    return buf;
}

ManufacturedCase build_case(CaseId id, const std::vector<double>& alphas, double kappa,
                            double L) {
    return id == CaseId::Sine1D ? make_sine_case_1d(alphas, kappa, L)
                                : make_sine_case_2d(alphas, kappa, L);
}

OperatorBundle build_bundle(const ManufacturedCase& mcase, const SpatialGrid& grid) {
    return mcase.dim() == 1 ? make_laplace_bundle_1d(grid, mcase.kernel.m())
                            : make_laplace_bundle_2d(grid);
}

} // namespace

double l2_error(std::span<const std::vector<double>> U_physical, const ManufacturedCase& mcase,
                const GradedMesh& mesh, const SpatialGrid& grid) {
    if (static_cast<int>(U_physical.size()) != mesh.N + 1)
        throw std::invalid_argument("l2_error: need U^0..U^N");
    const std::vector<double> phi = sample_profile(mcase, grid);
    const double weight = grid.dim == 1 ? grid.h() : grid.h() * grid.h();
    double worst = 0.0;
    for (int n = 1; n <= mesh.N; ++n) {
        if (U_physical[n].size() != phi.size())
            throw std::invalid_argument("l2_error: state dimension mismatch");
        const double scale =
            mcase.w.value(mesh.t[n]) * std::exp(-mcase.kernel.kappa * mesh.t[n]);
        double s = 0.0;
        for (size_t i = 0; i < phi.size(); ++i) {
            const double d = U_physical[n][i] - scale * phi[i];
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(weight * s));
    }
    return worst;
}

std::vector<double> convergence_rate(std::span<const double> errors) {
    if (errors.size() < 2) throw std::invalid_argument("convergence_rate: need >= 2 errors");
    std::vector<double> rates;
    rates.reserve(errors.size() - 1);
    for (size_t i = 1; i < errors.size(); ++i) {
        if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0))
            throw std::invalid_argument("convergence_rate: errors must be positive");
        rates.push_back(std::log2(errors[i - 1] / errors[i]));
    }
    return rates;
}

ProblemSpec make_study_problem(const ManufacturedCase& mcase, const SpatialGrid& grid,
                               GradedMesh mesh, SourceRule source_rule) {
    std::vector<double> phi = sample_profile(mcase, grid);
    ManufacturedCase time_part = mcase; // the source callable owns its own copy
    auto g = [time_part, phi](double t) {
        std::vector<double> out = phi;
        const double s = time_part.g_factor(t);
        for (double& x : out) x *= s;
        return out;
    };
    std::vector<double> u0 = phi;
    const double w0 = mcase.w.value(0.0);
    for (double& x : u0) x *= w0;
    return ProblemSpec{mcase.kernel, build_bundle(mcase, grid), std::move(mesh), std::move(g),
                       std::move(u0), source_rule};
}

ConvergenceReport run_study(const StudyConfig& config) {
    if (config.N_list.empty()) throw std::invalid_argument("study: empty N list");
    for (size_t i = 0; i < config.N_list.size(); ++i) {
        if (config.N_list[i] < 2) throw std::invalid_argument("study: each N must be >= 2");
        if (i > 0 && config.N_list[i] <= config.N_list[i - 1])
            throw std::invalid_argument("study: N list must be strictly increasing");
    }
    if (config.M < 2) throw std::invalid_argument("study: M must be >= 2");

    const ManufacturedCase mcase =
        build_case(config.example, config.alphas, config.kappa, config.L);
    const double gamma =
        resolve_gamma(config.gamma_rule, config.gamma_value, mcase.kernel.alpha_min());
    const SpatialGrid grid = make_grid(mcase.dim(), config.M, config.L);

    ConvergenceReport report;
    report.config = config;
    report.gamma = gamma;
    report.mesh_report =
        validate_mesh_hypotheses(build_graded_mesh(config.N_list.back(), gamma, config.T));

    std::vector<double> errors;
    for (int N : config.N_list) {
        const auto start = std::chrono::steady_clock::now();
        try {
            GradedMesh mesh = build_graded_mesh(N, gamma, config.T);
            ProblemSpec spec = make_study_problem(mcase, grid, std::move(mesh), config.source_rule);
            SchemeState state = run(spec);
            const std::vector<std::vector<double>> U =
                to_physical(state, spec.mesh, config.kappa);
            const double err = l2_error(U, mcase, spec.mesh, grid);
            const auto stop = std::chrono::steady_clock::now();
            ConvergenceRow row;
            row.N = N;
            row.error = err;
            row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            if (!errors.empty()) row.rate = std::log2(errors.back() / err);
            errors.push_back(err);
            report.rows.push_back(row);
        } catch (...) {
            // Flush what we have, with a marker row, before propagating.
            ConvergenceRow row;
            row.N = N;
            row.error = std::numeric_limits<double>::quiet_NaN();
            row.failed = true;
            report.rows.push_back(row);
            emit_report(report);
            throw;
        }
    }
    emit_report(report);
    return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
    const StudyConfig& c = report.config;
    out << "#example=" << example_name(c.example) << "\n";
    out << "#alphas=";
    for (size_t i = 0; i < c.alphas.size(); ++i) out << (i ? "," : "") << fmt(c.alphas[i]);
    out << "\n";
    out << "#kappa=" << fmt(c.kappa) << "\n";
    out << "#gamma_rule=" << gamma_rule_name(c.gamma_rule) << "\n";
    out << "#gamma=" << fmt(report.gamma) << "\n";
    out << "#N_list=";
    for (size_t i = 0; i < c.N_list.size(); ++i) out << (i ? "," : "") << c.N_list[i];
    out << "\n";
    out << "#M=" << c.M << "\n";
    out << "#source_rule=" << source_rule_name(c.source_rule) << "\n";
    out << "#T=" << fmt(c.T) << "\n";
    out << "#L=" << fmt(c.L) << "\n";
    out << "#norm=max_n discrete_L2\n";
    out << "#mesh_first_step_constant=" << fmt(report.mesh_report.first_step_constant) << "\n";
    out << "#mesh_step_bound_constant=" << fmt(report.mesh_report.step_bound_constant) << "\n";
    out << "#mesh_level_ratio_constant=" << fmt(report.mesh_report.level_ratio_constant) << "\n";
    out << "#mesh_increment_bound_constant=" << fmt(report.mesh_report.increment_bound_constant)
        << "\n";
    out << "#mesh_hypotheses_satisfied=" << (report.mesh_report.all_satisfied() ? "true" : "false")
        << "\n";
    out << "N,error,rate,wall_ms\n";
    for (const ConvergenceRow& r : report.rows) {
        if (r.failed) {
            out << r.N << ",ERROR,,\n";
            continue;
        }
        out << r.N << "," << fmt(r.error) << ",";
        if (r.rate) out << fmt(*r.rate);
        out << "," << fmt(r.wall_ms) << "\n";
    }
}

void write_aligned_table(const ConvergenceReport& report, std::ostream& out) {
    char buf[128];
    out << "example " << example_name(report.config.example) << "  kappa="
        << report.config.kappa << "  gamma=" << report.gamma << "  M=" << report.config.M
        << "  source=" << source_rule_name(report.config.source_rule) << "\n";
    std::snprintf(buf, sizeof buf, "%6s  %-12s  %-6s", "N", "error", "rate");
    out << buf << "\n";
    for (const ConvergenceRow& r : report.rows) {
        if (r.failed) {
            std::snprintf(buf, sizeof buf, "%6d  %-12s  %-6s", r.N, "ERROR", "");
        } else if (r.rate) {
            std::snprintf(buf, sizeof buf, "%6d  %-12.4e  %-6.2f", r.N, r.error, *r.rate);
        } else {
            std::snprintf(buf, sizeof buf, "%6d  %-12.4e  %-6s", r.N, r.error, "*");
        }
        out << buf << "\n";
    }
}

void emit_report(const ConvergenceReport& report) {
    if (report.config.format == ReportFormat::AlignedTable) write_aligned_table(report, std::cout);
    if (!report.config.out_path.empty()) {
        std::ofstream f(report.config.out_path);
        if (!f) throw std::invalid_argument("study: cannot open output file " +
                                            report.config.out_path);
        write_csv(report, f);
    }
}

StabilityReport run_stability_experiment(const StabilityConfig& config) {
    const ManufacturedCase mcase =
        build_case(config.example, config.alphas, config.kappa, config.L);
    const double gamma =
        resolve_gamma(config.gamma_rule, config.gamma_value, mcase.kernel.alpha_min());
    const SpatialGrid grid = make_grid(mcase.dim(), config.M, config.L);
    GradedMesh mesh = build_graded_mesh(config.N, gamma, config.T);

    const long dim = grid.interior_count();
    ProblemSpec spec{mcase.kernel, build_bundle(mcase, grid), std::move(mesh),
                     [dim](double) { return std::vector<double>(dim, 0.0); },
                     sample_profile(mcase, grid), SourceRule::Midpoint};
    SchemeState state = run(spec);

    StabilityReport report;
    report.config = config;
    report.gamma = gamma;
    const double e0 = energy(state, spec.mesh, config.kappa, 0);
    double norm0 = 0.0;
    report.norm_bounded_by_initial = true;
    report.norm_stepwise_monotone = true;
    report.energy_bounded = true;
    double prev_norm = 0.0;
    for (int n = 0; n <= state.n; ++n) {
        StabilityRow row;
        row.n = n;
        row.t = spec.mesh.t[n];
        double s = 0.0;
        for (double x : state.V[n]) s += x * x;
        row.norm_V = std::sqrt(state.norm_weight * s);
        row.energy = energy(state, spec.mesh, config.kappa, n);
        if (n == 0) {
            norm0 = row.norm_V;
        } else {
            if (row.norm_V > norm0 * (1.0 + 1e-12)) report.norm_bounded_by_initial = false;
            if (row.norm_V > prev_norm * (1.0 + 1e-12)) report.norm_stepwise_monotone = false;
            const double excess = (row.energy - e0) / std::max(std::abs(e0), 1e-300);
            report.max_energy_excess = std::max(report.max_energy_excess, excess);
            if (excess > 1e-12) report.energy_bounded = false;
        }
        prev_norm = row.norm_V;
        report.rows.push_back(row);
    }

    if (!config.out_path.empty()) {
        std::ofstream f(config.out_path);
        if (!f) throw std::invalid_argument("stability: cannot open output file " +
                                            config.out_path);
        write_stability_csv(report, f);
    }
    return report;
}

void write_stability_csv(const StabilityReport& report, std::ostream& out) {
    const StabilityConfig& c = report.config;
    out << "#example=" << example_name(c.example) << "\n";
    out << "#alphas=";
    for (size_t i = 0; i < c.alphas.size(); ++i) out << (i ? "," : "") << fmt(c.alphas[i]);
    out << "\n";
    out << "#kappa=" << fmt(c.kappa) << "\n";
    out << "#gamma_rule=" << gamma_rule_name(c.gamma_rule) << "\n";
    out << "#gamma=" << fmt(report.gamma) << "\n";
    out << "#N=" << c.N << "\n";
    out << "#M=" << c.M << "\n";
    out << "#T=" << fmt(c.T) << "\n";
    out << "#source=homogeneous\n";
    out << "#norm_bounded_by_initial=" << (report.norm_bounded_by_initial ? "pass" : "fail")
        << "\n";
    out << "#norm_stepwise_monotone=" << (report.norm_stepwise_monotone ? "yes" : "no") << "\n";
    out << "#energy_bounded=" << (report.energy_bounded ? "pass" : "fail") << "\n";
    out << "#max_energy_excess=" << fmt(report.max_energy_excess) << "\n";
    out << "n,t,norm_V,energy\n";
    for (const StabilityRow& r : report.rows)
        out << r.n << "," << fmt(r.t) << "," << fmt(r.norm_V) << "," << fmt(r.energy) << "\n";
}

} // namespace cnpi

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnpi/harness.hpp"

namespace {

struct GammaChoice {
    cnpi::GammaRule rule = cnpi::GammaRule::Optimal;
    double value = 1.0;
};

GammaChoice parse_gamma(const std::string& s) {
    if (s == "uniform") return {cnpi::GammaRule::Uniform, 1.0};
    if (s == "optimal") return {cnpi::GammaRule::Optimal, 1.0};
    if (s == "optimal+1") return {cnpi::GammaRule::OptimalPlusOne, 1.0};
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("--gamma expects uniform|optimal|optimal+1 or a number >= 1");
    }
    if (pos != s.size() || !(v >= 1.0))
        throw std::invalid_argument("--gamma expects uniform|optimal|optimal+1 or a number >= 1");
    return {cnpi::GammaRule::Explicit, v};
}

cnpi::CaseId parse_example(int example) {
    if (example == 1) return cnpi::CaseId::Sine1D;
    if (example == 2) return cnpi::CaseId::Sine2D;
    throw std::invalid_argument("--example must be 1 or 2");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Crank-Nicolson / product-integration solver for integrodifferential "
                 "equations with tempered weakly singular memory kernels"};
    app.require_subcommand(1);

    // solve / study share these
    int example = 1;
    std::vector<double> alphas{0.2, 0.8};
    double kappa = 1.0;
    std::string gamma_str = "optimal";
    int M = 256;
    std::string source = "midpoint";
    std::string out_path;
    bool table = false;

    auto add_common = [&](CLI::App* cmd, bool with_source) {
        cmd->add_option("--example", example, "Built-in case: 1 (1D) or 2 (2D)");
        cmd->add_option("--alphas", alphas, "Kernel exponents a1,a2 in (0,1)")
            ->delimiter(',')
            ->expected(2);
        cmd->add_option("--kappa", kappa, "Tempering parameter >= 0");
        cmd->add_option("--gamma", gamma_str, "uniform|optimal|optimal+1 or a number >= 1");
        cmd->add_option("--M", M, "Spatial partitions per dimension");
        if (with_source)
            cmd->add_option("--source", source, "Source rule: midpoint|average")
                ->check(CLI::IsMember({"midpoint", "average"}));
        cmd->add_option("--out", out_path, "Write a CSV report to this path");
        cmd->add_flag("--table", table, "Render an aligned table to stdout");
    };

    CLI::App* solve = app.add_subcommand("solve", "Run one N and report the error");
    int N_single = 64;
    add_common(solve, true);
    solve->add_option("--N", N_single, "Number of time steps")->required();

    CLI::App* study = app.add_subcommand("study", "Convergence study over an N ladder");
    std::vector<int> N_list{16, 32, 64, 128, 256};
    add_common(study, true);
    study->add_option("--N-list", N_list, "Comma-separated ladder, e.g. 16,32,64")
        ->delimiter(',');

    CLI::App* stability = app.add_subcommand(
        "stability", "Homogeneous-source run reporting |V^n| and the energy functional");
    int steps = 32;
    add_common(stability, false);
    stability->add_option("--steps", steps, "Number of time steps")->required();

    CLI::App* vmesh = app.add_subcommand("validate-mesh", "Report mesh hypothesis constants");
    int mesh_N = 16;
    std::string mesh_gamma = "2";
    double mesh_T = 1.0;
    vmesh->add_option("--N", mesh_N, "Number of time steps")->required();
    vmesh->add_option("--gamma", mesh_gamma, "uniform|optimal is not valid here; a number >= 1")
        ->required();
    vmesh->add_option("--T", mesh_T, "Final time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (solve->parsed() || study->parsed()) {
        cnpi::StudyConfig config;
        config.example = parse_example(example);
        config.alphas = alphas;
        config.kappa = kappa;
        const GammaChoice gc = parse_gamma(gamma_str);
        config.gamma_rule = gc.rule;
        config.gamma_value = gc.value;
        config.N_list = solve->parsed() ? std::vector<int>{N_single} : N_list;
        config.M = M;
        config.source_rule =
            source == "average" ? cnpi::SourceRule::EndpointAverage : cnpi::SourceRule::Midpoint;
        config.out_path = out_path;
        config.format = table ? cnpi::ReportFormat::AlignedTable : cnpi::ReportFormat::CSV;
        cnpi::ConvergenceReport report = cnpi::run_study(config);
        if (!table) {
            for (const cnpi::ConvergenceRow& r : report.rows) {
                std::printf("N=%d error=%.10e", r.N, r.error);
                if (r.rate) std::printf(" rate=%.4f", *r.rate);
                std::printf("\n");
            }
        }
        return 0;
    }

    if (stability->parsed()) {
        cnpi::StabilityConfig config;
        config.example = parse_example(example);
        config.alphas = alphas;
        config.kappa = kappa;
        const GammaChoice gc = parse_gamma(gamma_str);
        config.gamma_rule = gc.rule;
        config.gamma_value = gc.value;
        config.N = steps;
        config.M = M;
        config.out_path = out_path;
        cnpi::StabilityReport report = cnpi::run_stability_experiment(config);
        std::printf("norm_bounded_by_initial=%s\n",
                    report.norm_bounded_by_initial ? "pass" : "fail");
        std::printf("norm_stepwise_monotone=%s\n",
                    report.norm_stepwise_monotone ? "yes" : "no");
        std::printf("energy_bounded=%s (max excess %.3e)\n",
                    report.energy_bounded ? "pass" : "fail", report.max_energy_excess);
        return 0;
    }

    // validate-mesh
    const GammaChoice gc = parse_gamma(mesh_gamma);
    const double gamma_value =
        cnpi::resolve_gamma(gc.rule, gc.value, 0.5); // keyword rules need some alpha; 0.5 typical
    cnpi::GradedMesh mesh = cnpi::build_graded_mesh(mesh_N, gamma_value, mesh_T);
    cnpi::MeshHypothesisReport rep = cnpi::validate_mesh_hypotheses(mesh);
    std::printf("N=%d gamma=%.6f T=%.6f k_base=%.10e t1=%.10e\n", mesh.N, mesh.gamma, mesh.T,
                mesh.k_base, mesh.t[1]);
    std::printf("first_step_constant=%.6e (%s)\n", rep.first_step_constant,
                rep.first_step_ok ? "ok" : "violated");
    std::printf("step_bound_constant=%.6e (%s)\n", rep.step_bound_constant,
                rep.step_bound_ok ? "ok" : "violated");
    std::printf("level_ratio_constant=%.6e (%s)\n", rep.level_ratio_constant,
                rep.level_ratio_ok ? "ok" : "violated");
    std::printf("increment_bound_constant=%.6e (%s)\n", rep.increment_bound_constant,
                rep.increment_ok ? "ok" : "violated");
    std::printf("all_satisfied=%s\n", rep.all_satisfied() ? "true" : "false");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const cnpi::solver_error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "cnpi/harness.hpp"

#include "support/oracle_constants.hpp"

using cnpi::CaseId;
using cnpi::GammaRule;
using cnpi::StudyConfig;

namespace {

// wall_ms is the only nondeterministic column; drop it before comparing.
std::string strip_timings(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            const size_t pos = line.rfind(',');
            if (pos != std::string::npos) line.erase(pos);
        }
        out << line << "\n";
    }
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("grading exponent rules") {
    CHECK(cnpi::resolve_gamma(GammaRule::Uniform, 99.0, 0.2) == 1.0);
    CHECK(cnpi::resolve_gamma(GammaRule::Optimal, 99.0, 0.2) ==
          doctest::Approx(2.0 / 1.2).epsilon(1e-15));
    CHECK(cnpi::resolve_gamma(GammaRule::OptimalPlusOne, 99.0, 0.2) ==
          doctest::Approx(2.0 / 1.2 + 1.0).epsilon(1e-15));
    CHECK(cnpi::resolve_gamma(GammaRule::Explicit, 2.5, 0.2) == 2.5);
    CHECK_THROWS_AS((void)cnpi::resolve_gamma(GammaRule::Explicit, 0.5, 0.2),
                    std::invalid_argument);
}

TEST_CASE("rate computation") {
    const std::vector<double> errors{1.2098e-02, 4.9207e-03};
    const std::vector<double> rates = cnpi::convergence_rate(errors);
    REQUIRE(rates.size() == 1);
    CHECK(rates[0] == doctest::Approx(oracle::kRateSample).epsilon(1e-12));

    const std::vector<double> ladder{8.0, 4.0, 1.0};
    const std::vector<double> two = cnpi::convergence_rate(ladder);
    CHECK(two[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two[1] == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS((void)cnpi::convergence_rate(std::vector<double>{1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)cnpi::convergence_rate(std::vector<double>{1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)cnpi::convergence_rate(std::vector<double>{1.0, -2.0}),
                    std::invalid_argument);
}

TEST_CASE("error norm against exact snapshots") {
    const cnpi::ManufacturedCase mcase = cnpi::make_sine_case_1d({0.3, 0.7}, 1.0);
    const cnpi::SpatialGrid grid = cnpi::make_grid(1, 16, 1.0);
    const cnpi::GradedMesh mesh = cnpi::build_graded_mesh(6, 2.0, 1.0);

    std::vector<std::vector<double>> U(mesh.N + 1);
    for (int n = 0; n <= mesh.N; ++n) U[n] = cnpi::sample_exact(mcase, grid, mesh.t[n]);
    CHECK(cnpi::l2_error(U, mcase, mesh, grid) == 0.0);

    U[2][3] += 1e-3;
    CHECK(cnpi::l2_error(U, mcase, mesh, grid) ==
          doctest::Approx(std::sqrt(grid.h()) * 1e-3).epsilon(1e-12));

    std::vector<std::vector<double>> short_history(mesh.N);
    CHECK_THROWS_AS((void)cnpi::l2_error(short_history, mcase, mesh, grid),
                    std::invalid_argument);
    U[4].resize(3);
    CHECK_THROWS_AS((void)cnpi::l2_error(U, mcase, mesh, grid), std::invalid_argument);
}

TEST_CASE("study problem assembly") {
    const cnpi::ManufacturedCase mcase = cnpi::make_sine_case_2d({0.4, 0.8}, 2.0);
    const cnpi::SpatialGrid grid = cnpi::make_grid(2, 6, 1.0);
    cnpi::GradedMesh mesh = cnpi::build_graded_mesh(4, 1.5, 1.0);
    const cnpi::ProblemSpec spec =
        cnpi::make_study_problem(mcase, grid, mesh, cnpi::SourceRule::Midpoint);

    CHECK(spec.bundle.kind == cnpi::BundleKind::Laplace2D);
    CHECK(spec.mesh.N == 4);
    CHECK(spec.kernel.kappa == 2.0);

    const std::vector<double> phi = cnpi::sample_profile(mcase, grid);
    REQUIRE(spec.u0.size() == phi.size());
    for (size_t i = 0; i < phi.size(); ++i)
        CHECK(spec.u0[i] == doctest::Approx(phi[i]).epsilon(1e-15)); // w(0) = 1

    const std::vector<double> g_half = spec.g(0.5);
    const double factor = mcase.g_factor(0.5);
    for (size_t i = 0; i < phi.size(); ++i)
        CHECK(g_half[i] == doctest::Approx(factor * phi[i]).epsilon(1e-13));
}

TEST_CASE("study configuration validation") {
    StudyConfig config;
    config.example = CaseId::Sine1D;
    config.alphas = {0.2, 0.8};
    config.M = 8;

    config.N_list = {};
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
    config.N_list = {1, 4};
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
    config.N_list = {8, 8};
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
    config.N_list = {16, 8};
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
    config.N_list = {8, 16};
    config.M = 1;
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
}

TEST_CASE("a small study converges and reports") {
    StudyConfig config;
    config.example = CaseId::Sine1D;
    config.alphas = {0.2, 0.8};
    config.kappa = 1.0;
    config.gamma_rule = GammaRule::Optimal;
    config.N_list = {8, 16, 32};
    config.M = 128; // keeps the spatial floor well below the temporal error
    config.source_rule = cnpi::SourceRule::EndpointAverage;

    const cnpi::ConvergenceReport report = cnpi::run_study(config);
    CHECK(report.gamma == doctest::Approx(2.0 / 1.2).epsilon(1e-15));
    CHECK(report.mesh_report.all_satisfied());
    REQUIRE(report.rows.size() == 3);
    CHECK_FALSE(report.rows[0].rate.has_value());
    for (size_t i = 0; i < 3; ++i) {
        CHECK_FALSE(report.rows[i].failed);
        CHECK(report.rows[i].error > 0.0);
        CHECK(report.rows[i].wall_ms >= 0.0);
        if (i > 0) {
            CHECK(report.rows[i].error < report.rows[i - 1].error);
            REQUIRE(report.rows[i].rate.has_value());
            CHECK(*report.rows[i].rate > 1.0);
        }
    }

    SUBCASE("csv shape") {
        std::ostringstream out;
        cnpi::write_csv(report, out);
        const std::string csv = out.str();
        CHECK(csv.find("#example=1\n") != std::string::npos);
        CHECK(csv.find("#gamma_rule=optimal\n") != std::string::npos);
        CHECK(csv.find("#source_rule=average\n") != std::string::npos);
        CHECK(csv.find("#mesh_hypotheses_satisfied=true\n") != std::string::npos);
        CHECK(csv.find("N,error,rate,wall_ms\n") != std::string::npos);
        CHECK(csv.find("\n8,") != std::string::npos);
        CHECK(csv.find("\n16,") != std::string::npos);
    }

    SUBCASE("aligned table shape") {
        std::ostringstream out;
        cnpi::write_aligned_table(report, out);
        const std::string table = out.str();
        CHECK(table.find("error") != std::string::npos);
        CHECK(table.find("rate") != std::string::npos);
        CHECK(table.find("*") != std::string::npos);
    }

    SUBCASE("reruns are deterministic modulo timings") {
        const cnpi::ConvergenceReport again = cnpi::run_study(config);
        std::ostringstream a, b;
        cnpi::write_csv(report, a);
        cnpi::write_csv(again, b);
        CHECK(strip_timings(a.str()) == strip_timings(b.str()));
        for (size_t i = 0; i < 3; ++i)
            CHECK(again.rows[i].error == report.rows[i].error); // bitwise
    }
}

TEST_CASE("failed runs leave a marked partial report") {
    const std::string path = "cnpi_test_failed_study.csv";
    StudyConfig config;
    config.example = CaseId::Sine1D;
    config.alphas = {0.2, 0.8};
    config.kappa = 40.0; // tempering guard rejects kappa*T > 30
    config.N_list = {8, 16};
    config.M = 8;
    config.out_path = path;

    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
    const std::string csv = slurp(path);
    CHECK(csv.find("8,ERROR,,") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("unwritable report path is rejected") {
    StudyConfig config;
    config.example = CaseId::Sine1D;
    config.alphas = {0.2, 0.8};
    config.N_list = {4};
    config.M = 8;
    config.out_path = "no_such_directory/report.csv";
    CHECK_THROWS_AS((void)cnpi::run_study(config), std::invalid_argument);
}

TEST_CASE("stability experiment reports norms and energy") {
    cnpi::StabilityConfig config;
    config.example = CaseId::Sine1D;
    config.alphas = {0.4, 0.6};
    config.kappa = 0.0;
    config.gamma_rule = GammaRule::Explicit;
    config.gamma_value = 2.0;
    config.N = 32;
    config.M = 8;

    const cnpi::StabilityReport report = cnpi::run_stability_experiment(config);
    REQUIRE(report.rows.size() == 33);
    CHECK(report.gamma == 2.0);
    CHECK(report.rows[0].n == 0);
    CHECK(report.rows[0].t == 0.0);
    CHECK(report.rows[0].norm_V ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-3)); // discrete sine norm
    CHECK(report.rows[0].energy ==
          doctest::Approx(report.rows[0].norm_V * report.rows[0].norm_V).epsilon(1e-14));
    CHECK(report.norm_bounded_by_initial);
    CHECK(report.energy_bounded);
    CHECK(report.max_energy_excess <= 1e-12);
    for (int n = 1; n <= 32; ++n) {
        CHECK(report.rows[n].t > report.rows[n - 1].t);
        CHECK(report.rows[n].norm_V <= report.rows[0].norm_V * (1.0 + 1e-12));
    }

    SUBCASE("tempered variant keeps the energy bounded") {
        config.kappa = 1.5;
        const cnpi::StabilityReport tempered = cnpi::run_stability_experiment(config);
        CHECK(tempered.energy_bounded);
        CHECK(tempered.norm_bounded_by_initial);
    }

    SUBCASE("csv emission") {
        const std::string path = "cnpi_test_stability.csv";
        config.out_path = path;
        (void)cnpi::run_stability_experiment(config);
        const std::string csv = slurp(path);
        CHECK(csv.find("#energy_bounded=pass") != std::string::npos);
        CHECK(csv.find("#norm_bounded_by_initial=pass") != std::string::npos);
        CHECK(csv.find("n,t,norm_V,energy\n") != std::string::npos);
        CHECK(csv.find("\n0,") != std::string::npos);
        std::remove(path.c_str());
    }
}

} // TEST_SUITE

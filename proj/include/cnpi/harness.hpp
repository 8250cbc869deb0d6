#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cnpi/manufactured.hpp"
#include "cnpi/mesh.hpp"
#include "cnpi/stepper.hpp"

namespace cnpi {

enum class GammaRule { Uniform, Optimal, OptimalPlusOne, Explicit };

// Grading exponent for a rule: 1, 2/(1+alpha_min), 2/(1+alpha_min)+1, or the
// explicit value.
double resolve_gamma(GammaRule rule, double explicit_value, double alpha_min);

enum class ReportFormat { CSV, AlignedTable };

struct StudyConfig {
    CaseId example = CaseId::Sine1D;
    std::vector<double> alphas;
    double kappa = 1.0;
    GammaRule gamma_rule = GammaRule::Optimal;
    double gamma_value = 1.0; // used when gamma_rule == Explicit
    std::vector<int> N_list;
    int M = 256;
    SourceRule source_rule = SourceRule::Midpoint;
    double T = 1.0;
    double L = 1.0;
    std::string out_path;     // empty: no file written
    ReportFormat format = ReportFormat::CSV;
};

struct ConvergenceRow {
    int N = 0;
    double error = 0.0;
    std::optional<double> rate; // absent on the first row and error rows
    double wall_ms = 0.0;
    bool failed = false;
};

struct ConvergenceReport {
    StudyConfig config;
    double gamma = 1.0;
    MeshHypothesisReport mesh_report; // for the largest N in the study
    std::vector<ConvergenceRow> rows;
};

// max over n >= 1 of the discrete grid norm of U^n - u(., t_n).
double l2_error(std::span<const std::vector<double>> U_physical, const ManufacturedCase& mcase,
                const GradedMesh& mesh, const SpatialGrid& grid);

// rate[i] = log2(errors[i] / errors[i+1]); requires positive inputs.
std::vector<double> convergence_rate(std::span<const double> errors);

// Grid, operator bundle, and transformed source assembled for one mesh.
ProblemSpec make_study_problem(const ManufacturedCase& mcase, const SpatialGrid& grid,
                               GradedMesh mesh, SourceRule source_rule);

ConvergenceReport run_study(const StudyConfig& config);

void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_aligned_table(const ConvergenceReport& report, std::ostream& out);
void emit_report(const ConvergenceReport& report); // file and/or stdout per config

struct StabilityConfig {
    CaseId example = CaseId::Sine1D;
    std::vector<double> alphas;
    double kappa = 0.0;
    GammaRule gamma_rule = GammaRule::Optimal;
    double gamma_value = 1.0;
    int N = 32;
    int M = 16;
    double T = 1.0;
    double L = 1.0;
    std::string out_path;
};

struct StabilityRow {
    int n = 0;
    double t = 0.0;
    double norm_V = 0.0;
    double energy = 0.0;
};

// Homogeneous-source run from the case's profile: reports |V^n| and E^n per
// step plus the two testable properties (|V^n| <= |V^0|, E^n <= E^0).
struct StabilityReport {
    StabilityConfig config;
    double gamma = 1.0;
    std::vector<StabilityRow> rows;
    bool norm_bounded_by_initial = false;
    bool norm_stepwise_monotone = false; // informational; not theory-backed
    bool energy_bounded = false;
    double max_energy_excess = 0.0; // max over n of (E^n - E^0)/|E^0|
};

StabilityReport run_stability_experiment(const StabilityConfig& config);

void write_stability_csv(const StabilityReport& report, std::ostream& out);

} // namespace cnpi

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "cachenet/analytics.hpp"

namespace cachenet {

// Maximize the closed-form energy efficiency over the per-cluster active-SBS
// densities, subject to the caching power budget (total consumed power must
// not exceed the no-caching network at the same total density) and the
// deployment cap Σλ_sk ≤ λ_s_max. Clusters with assigned users keep a small
// positive floor so their association stays defined.
class DensityProblem {
public:
    DensityProblem(ClusteredScenario scenario, double lambda_s_max,
                   double lambda_floor = 1e-4);

    double objective(const DensityVector& densities) const;  // energy efficiency
    // C(Λ) = ρ^c(Λ) − ρ^nc(Σλ); feasible when ≤ 0
    double budget_constraint(const DensityVector& densities) const;
    double lower_bound(std::size_t cluster) const;  // floor if populated, else 0

    std::size_t num_clusters() const;
    double lambda_s_max() const { return lambda_s_max_; }
    double lambda_floor() const { return lambda_floor_; }
    const ClusteredScenario& scenario() const { return *scenario_; }
    const ScenarioEvaluator& evaluator() const { return *evaluator_; }

private:
    std::shared_ptr<const ClusteredScenario> scenario_;
    std::shared_ptr<const ScenarioEvaluator> evaluator_;
    double lambda_s_max_;
    double lambda_floor_;
    std::vector<bool> populated_;
};

double ee_objective(const DensityVector& densities, const DensityProblem& problem);

// Central differences with per-component step h = max(h_rel·λ_k, h_abs).
std::vector<double> numeric_gradient(const DensityVector& densities,
                                     const DensityProblem& problem,
                                     double h_rel = 1e-5, double h_abs = 1e-8);

struct StepSchedule {
    // trial step length (a · λ_s_max)/(b + iter) along the normalized
    // gradient, halved by backtracking until feasible and improving
    double a = 0.5;
    double b = 10.0;
};

struct IterateTracePoint {
    int iter;
    DensityVector densities;
    double ee;
    double projected_gradient_norm;
};

struct OptResult {
    DensityVector lambda_star;
    double ee_value = 0.0;
    double kkt_residual = 0.0;
    bool budget_active = false;
    bool cap_active = false;
    int iterations = 0;
};

// Equal split at 0.9·λ_s_max/N_c, halved until the power budget holds.
// Throws when no strictly feasible start exists above the floor.
DensityVector feasible_init(const DensityProblem& problem);

// Projected gradient ascent: trial steps a/(b+iter) along the normalized
// gradient, projected onto {λ ≥ floor, Σλ ≤ λ_s_max}, with the nonlinear
// budget constraint enforced by backtracking along the ascent direction.
// Returns the best iterate; the KKT residual is the norm of the Lagrangian
// gradient with multipliers fitted by non-negative least squares on the
// active constraints, normalized by (1 + ‖∇Σ‖).
OptResult solve_density(const DensityProblem& problem, const DensityVector& init,
                        StepSchedule schedule = {}, int max_iters = 5000,
                        double tol = 1e-6,
                        std::vector<IterateTracePoint>* trace = nullptr);

struct UnimodalityReport {
    int lines_probed = 0;
    int violations = 0;  // lines whose finite-difference signs are not +…+−…−
};

// Samples random feasible affine lines t ↦ tZ + Λ⁰ (truncated to the
// feasible segment) and counts lines on which the objective is not unimodal
// beyond noise tolerance.
UnimodalityReport unimodality_probe(const DensityProblem& problem, int num_lines,
                                    std::uint64_t seed, int grid_points = 201);

// CSV rows "iter,lambda_1..lambda_K,ee,projected_gradient_norm".
void write_iterate_trace(std::ostream& out, const std::vector<IterateTracePoint>& trace);

// min ‖b − Ax‖ subject to x ≥ 0 (Lawson–Hanson); A is column-major m×n.
std::vector<double> nonnegative_least_squares(const std::vector<double>& a, int m, int n,
                                              const std::vector<double>& b);

}  // namespace cachenet

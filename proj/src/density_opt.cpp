#include "cachenet/density_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "cachenet/rng.hpp"

namespace cachenet {

namespace {

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

DensityProblem::DensityProblem(ClusteredScenario scenario, double lambda_s_max,
                               double lambda_floor)
    : lambda_s_max_(lambda_s_max), lambda_floor_(lambda_floor) {
    if (!(lambda_s_max > 0.0))
        throw std::invalid_argument("density problem: lambda_s_max must be > 0");
    scenario_ = std::make_shared<const ClusteredScenario>(std::move(scenario));
    evaluator_ = std::make_shared<const ScenarioEvaluator>(*scenario_);
    populated_.assign(scenario_->num_clusters(), false);
    for (std::size_t c : scenario_->assignment) populated_[c] = true;
}

std::size_t DensityProblem::num_clusters() const { return scenario_->num_clusters(); }

double DensityProblem::lower_bound(std::size_t cluster) const {
    return populated_[cluster] ? lambda_floor_ : 0.0;
}

double DensityProblem::objective(const DensityVector& densities) const {
    if (densities.size() != num_clusters())
        throw std::invalid_argument("density problem: dimension mismatch");
    for (std::size_t k = 0; k < densities.size(); ++k)
        if (densities.per_cluster[k] < 0.0 ||
            (populated_[k] && !(densities.per_cluster[k] > 0.0)))
            throw std::invalid_argument("density problem: infeasible densities");
    return evaluator_->energy_efficiency(densities);
}

double DensityProblem::budget_constraint(const DensityVector& densities) const {
    const double cached = evaluator_->total_power(densities);
    const double uncached = total_power_uncached(densities.total(), scenario_->region,
                                                 scenario_->channel, scenario_->power);
    return cached - uncached;
}

double ee_objective(const DensityVector& densities, const DensityProblem& problem) {
    return problem.objective(densities);
}

std::vector<double> numeric_gradient(const DensityVector& densities,
                                     const DensityProblem& problem, double h_rel,
                                     double h_abs) {
    const std::size_t K = densities.size();
    std::vector<double> grad(K, 0.0);
    DensityVector probe = densities;
    for (std::size_t k = 0; k < K; ++k) {
        const double x = densities.per_cluster[k];
        double h = std::max(h_rel * std::fabs(x), h_abs);
        if (x - h < 0.5 * problem.lower_bound(k)) h = 0.5 * x;
        probe.per_cluster[k] = x + h;
        const double up = problem.objective(probe);
        probe.per_cluster[k] = x - h;
        const double down = problem.objective(probe);
        probe.per_cluster[k] = x;
        grad[k] = (up - down) / (2.0 * h);
    }
    return grad;
}

namespace {

// Euclidean projection onto {λ_k ≥ lo_k, Σλ ≤ smax}.
DensityVector project_box_cap(const DensityVector& v, const DensityProblem& problem) {
    const std::size_t K = v.size();
    DensityVector out = v;
    for (std::size_t k = 0; k < K; ++k)
        out.per_cluster[k] = std::max(out.per_cluster[k], problem.lower_bound(k));
    const double smax = problem.lambda_s_max();
    if (out.total() <= smax) return out;
    // water-filling threshold by bisection: λ_k(τ) = max(lo_k, v_k − τ)
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < K; ++k) hi = std::max(hi, v.per_cluster[k]);
    for (int it = 0; it < 100; ++it) {
        const double tau = 0.5 * (lo + hi);
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            total += std::max(problem.lower_bound(k), v.per_cluster[k] - tau);
        if (total > smax)
            lo = tau;
        else
            hi = tau;
    }
    for (std::size_t k = 0; k < K; ++k)
        out.per_cluster[k] = std::max(problem.lower_bound(k), v.per_cluster[k] - hi);
    return out;
}

bool budget_feasible(const DensityProblem& problem, const DensityVector& v,
                     double tol_scale) {
    return problem.budget_constraint(v) <= 1e-8 * tol_scale;
}

}  // namespace

DensityVector feasible_init(const DensityProblem& problem) {
    const std::size_t K = problem.num_clusters();
    DensityVector init;
    init.per_cluster.assign(K, 0.9 * problem.lambda_s_max() / static_cast<double>(K));
    const double scale_ref = total_power_uncached(
        std::max(init.total(), problem.lambda_floor()), problem.scenario().region,
        problem.scenario().channel, problem.scenario().power);
    for (int attempt = 0; attempt < 60; ++attempt) {
        bool above_floor = true;
        for (std::size_t k = 0; k < K; ++k)
            if (init.per_cluster[k] < problem.lower_bound(k)) above_floor = false;
        if (!above_floor) break;
        if (budget_feasible(problem, init, scale_ref)) return init;
        for (double& x : init.per_cluster) x *= 0.5;
    }
    throw std::runtime_error("feasible_init: no strictly feasible start found");
}

OptResult solve_density(const DensityProblem& problem, const DensityVector& init,
                        StepSchedule schedule, int max_iters, double tol,
                        std::vector<IterateTracePoint>* trace) {
    const std::size_t K = problem.num_clusters();
    if (init.size() != K) throw std::invalid_argument("solve_density: bad init size");
    const double budget_scale = total_power_uncached(
        std::max(init.total(), problem.lambda_floor()), problem.scenario().region,
        problem.scenario().channel, problem.scenario().power);
    for (std::size_t k = 0; k < K; ++k)
        if (init.per_cluster[k] < problem.lower_bound(k))
            throw std::invalid_argument("solve_density: init below the density floor");
    if (init.total() > problem.lambda_s_max() + 1e-12 ||
        !budget_feasible(problem, init, budget_scale))
        throw std::invalid_argument("solve_density: init infeasible");

    DensityVector x = init;
    double fx = problem.objective(x);
    DensityVector best = x;
    double best_f = fx;

    OptResult result;
    int stalls = 0;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        std::vector<double> grad = numeric_gradient(x, problem);
        const double gnorm = norm2(grad);

        // projected-gradient optimality measure
        DensityVector probe = x;
        for (std::size_t k = 0; k < K; ++k) probe.per_cluster[k] += grad[k];
        probe = project_box_cap(probe, problem);
        double pg = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double d = probe.per_cluster[k] - x.per_cluster[k];
            pg += d * d;
        }
        pg = std::sqrt(pg);
        if (trace) trace->push_back({iter, x, fx, pg});
        if (pg < tol) break;
        if (gnorm == 0.0) break;

        double step =
            schedule.a * problem.lambda_s_max() / (schedule.b + static_cast<double>(iter));
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving) {
            DensityVector y = x;
            for (std::size_t k = 0; k < K; ++k)
                y.per_cluster[k] += step * grad[k] / gnorm;
            y = project_box_cap(y, problem);
            if (budget_feasible(problem, y, budget_scale)) {
                const double fy = problem.objective(y);
                if (fy > fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (improved) {
            stalls = 0;
            if (fx > best_f) {
                best_f = fx;
                best = x;
            }
        } else if (++stalls >= 3) {
            break;
        }
    }

    result.lambda_star = best;
    result.ee_value = best_f;
    result.iterations = iter;

    // active constraints at the returned point
    const double cap_slack = problem.lambda_s_max() - best.total();
    const double budget = problem.budget_constraint(best);
    result.cap_active = cap_slack < 1e-6 * std::max(1.0, problem.lambda_s_max());
    result.budget_active = std::fabs(budget) < 1e-6 * budget_scale;

    std::vector<double> grad = numeric_gradient(best, problem);
    std::vector<double> columns;  // column-major active-constraint gradients
    int n_cols = 0;
    if (result.budget_active) {
        DensityVector probe = best;
        for (std::size_t k = 0; k < K; ++k) {
            const double x0 = probe.per_cluster[k];
            double h = std::max(1e-5 * std::fabs(x0), 1e-8);
            probe.per_cluster[k] = x0 + h;
            const double up = problem.budget_constraint(probe);
            probe.per_cluster[k] = x0 - h;
            const double down = problem.budget_constraint(probe);
            probe.per_cluster[k] = x0;
            columns.push_back((up - down) / (2.0 * h));
        }
        ++n_cols;
    }
    if (result.cap_active) {
        for (std::size_t k = 0; k < K; ++k) columns.push_back(1.0);
        ++n_cols;
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (best.per_cluster[k] - problem.lower_bound(k) < 1e-9) {
            std::vector<double> e(K, 0.0);
            e[k] = -1.0;
            columns.insert(columns.end(), e.begin(), e.end());
            ++n_cols;
        }
    }
    std::vector<double> residual = grad;
    if (n_cols > 0) {
        const std::vector<double> mu =
            nonnegative_least_squares(columns, static_cast<int>(K), n_cols, grad);
        for (int c = 0; c < n_cols; ++c)
            for (std::size_t k = 0; k < K; ++k)
                residual[k] -= mu[static_cast<std::size_t>(c)] *
                               columns[static_cast<std::size_t>(c) * K + k];
    }
    result.kkt_residual = norm2(residual) / (1.0 + norm2(grad));
    return result;
}

UnimodalityReport unimodality_probe(const DensityProblem& problem, int num_lines,
                                    std::uint64_t seed, int grid_points) {
    const std::size_t K = problem.num_clusters();
    const double smax = problem.lambda_s_max();
    const double budget_scale = total_power_uncached(
        smax, problem.scenario().region, problem.scenario().channel,
        problem.scenario().power);
    Rng rng(seed);
    UnimodalityReport report;
    for (int line = 0; line < num_lines; ++line) {
        // interior feasible anchor
        DensityVector anchor;
        anchor.per_cluster.resize(K);
        for (int attempt = 0;; ++attempt) {
            double total = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                anchor.per_cluster[k] = problem.lower_bound(k) +
                                        rng.uniform(0.05, 1.0) * smax /
                                            static_cast<double>(K);
                total += anchor.per_cluster[k];
            }
            if (total > 0.95 * smax) {
                const double scale = 0.95 * smax / total;
                for (double& v : anchor.per_cluster) v *= scale;
                for (std::size_t k = 0; k < K; ++k)
                    anchor.per_cluster[k] =
                        std::max(anchor.per_cluster[k], problem.lower_bound(k));
            }
            if (budget_feasible(problem, anchor, budget_scale)) break;
            if (attempt > 50) break;
        }
        std::vector<double> direction(K);
        for (double& z : direction) z = rng.normal();
        const double znorm = norm2(direction);
        if (znorm == 0.0) continue;
        for (double& z : direction) z /= znorm;

        // feasible t-range from the linear constraints
        double t_lo = -std::numeric_limits<double>::infinity();
        double t_hi = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            const double z = direction[k];
            const double slack = anchor.per_cluster[k] - problem.lower_bound(k);
            if (z > 0.0)
                t_lo = std::max(t_lo, -slack / z);
            else if (z < 0.0)
                t_hi = std::min(t_hi, slack / -z);
        }
        double z_total = 0.0;
        for (double z : direction) z_total += z;
        const double cap_slack = smax - anchor.total();
        if (z_total > 0.0)
            t_hi = std::min(t_hi, cap_slack / z_total);
        else if (z_total < 0.0)
            t_lo = std::max(t_lo, -cap_slack / -z_total);
        if (!(t_hi > t_lo)) continue;

        // evaluate on the grid, truncated to the budget-feasible run around 0
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(grid_points));
        std::vector<bool> feasible(static_cast<std::size_t>(grid_points));
        std::vector<double> ts(static_cast<std::size_t>(grid_points));
        for (int i = 0; i < grid_points; ++i) {
            const double t =
                t_lo + (t_hi - t_lo) * static_cast<double>(i) /
                           static_cast<double>(grid_points - 1);
            ts[static_cast<std::size_t>(i)] = t;
            DensityVector point = anchor;
            for (std::size_t k = 0; k < K; ++k)
                point.per_cluster[k] =
                    std::max(anchor.per_cluster[k] + t * direction[k],
                             problem.lower_bound(k));
            feasible[static_cast<std::size_t>(i)] =
                budget_feasible(problem, point, budget_scale);
        }
        int zero_idx = 0;
        for (int i = 1; i < grid_points; ++i)
            if (std::fabs(ts[static_cast<std::size_t>(i)]) <
                std::fabs(ts[static_cast<std::size_t>(zero_idx)]))
                zero_idx = i;
        int lo_idx = zero_idx, hi_idx = zero_idx;
        while (lo_idx > 0 && feasible[static_cast<std::size_t>(lo_idx - 1)]) --lo_idx;
        while (hi_idx + 1 < grid_points && feasible[static_cast<std::size_t>(hi_idx + 1)])
            ++hi_idx;
        if (hi_idx - lo_idx < 8) continue;

        double max_abs = 0.0;
        for (int i = lo_idx; i <= hi_idx; ++i) {
            DensityVector point = anchor;
            for (std::size_t k = 0; k < K; ++k)
                point.per_cluster[k] =
                    std::max(anchor.per_cluster[k] +
                                 ts[static_cast<std::size_t>(i)] * direction[k],
                             problem.lower_bound(k));
            values.push_back(problem.objective(point));
            max_abs = std::max(max_abs, std::fabs(values.back()));
        }
        ++report.lines_probed;

        const double noise_tol = 1e-11 * std::max(max_abs, 1e-300);
        int transitions = 0;
        int last_sign = 0;
        bool upward_transition = false;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double diff = values[i + 1] - values[i];
            if (std::fabs(diff) <= noise_tol) continue;
            const int sign = diff > 0.0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign) {
                ++transitions;
                if (sign == 1) upward_transition = true;
            }
            last_sign = sign;
        }
        if (transitions > 1 || (transitions == 1 && upward_transition))
            ++report.violations;
    }
    return report;
}

void write_iterate_trace(std::ostream& out, const std::vector<IterateTracePoint>& trace) {
    if (trace.empty()) return;
    out << "iter";
    for (std::size_t k = 0; k < trace.front().densities.size(); ++k)
        out << ",lambda_" << (k + 1) << "_per_km2";
    out << ",energy_efficiency_per_w,projected_gradient_norm\n";
    out.precision(12);
    for (const auto& point : trace) {
        out << point.iter;
        for (double v : point.densities.per_cluster) out << "," << v;
        out << "," << point.ee << "," << point.projected_gradient_norm << "\n";
    }
}

std::vector<double> nonnegative_least_squares(const std::vector<double>& a, int m, int n,
                                              const std::vector<double>& b) {
    // Lawson-Hanson active set; dimensions here are tiny (n ≤ K + 2).
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    auto col = [&](int j, int i) { return a[static_cast<std::size_t>(j) * m + i]; };

    auto solve_passive = [&](std::vector<double>& z) {
        // normal equations restricted to the passive set
        std::vector<int> idx;
        for (int j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        const int p = static_cast<int>(idx.size());
        std::fill(z.begin(), z.end(), 0.0);
        if (p == 0) return;
        std::vector<double> ata(static_cast<std::size_t>(p) * p, 0.0);
        std::vector<double> atb(static_cast<std::size_t>(p), 0.0);
        for (int r = 0; r < p; ++r) {
            for (int c = 0; c < p; ++c) {
                double acc = 0.0;
                for (int i = 0; i < m; ++i) acc += col(idx[r], i) * col(idx[c], i);
                ata[static_cast<std::size_t>(r) * p + c] = acc;
            }
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += col(idx[r], i) * b[static_cast<std::size_t>(i)];
            atb[static_cast<std::size_t>(r)] = acc;
        }
        // Gaussian elimination with partial pivoting and a ridge fallback
        for (int r = 0; r < p; ++r) ata[static_cast<std::size_t>(r) * p + r] += 1e-12;
        std::vector<double> sol = atb;
        for (int c = 0; c < p; ++c) {
            int pivot = c;
            for (int r = c + 1; r < p; ++r)
                if (std::fabs(ata[static_cast<std::size_t>(r) * p + c]) >
                    std::fabs(ata[static_cast<std::size_t>(pivot) * p + c]))
                    pivot = r;
            for (int k = 0; k < p; ++k)
                std::swap(ata[static_cast<std::size_t>(c) * p + k],
                          ata[static_cast<std::size_t>(pivot) * p + k]);
            std::swap(sol[static_cast<std::size_t>(c)], sol[static_cast<std::size_t>(pivot)]);
            const double d = ata[static_cast<std::size_t>(c) * p + c];
            for (int r = c + 1; r < p; ++r) {
                const double f = ata[static_cast<std::size_t>(r) * p + c] / d;
                for (int k = c; k < p; ++k)
                    ata[static_cast<std::size_t>(r) * p + k] -=
                        f * ata[static_cast<std::size_t>(c) * p + k];
                sol[static_cast<std::size_t>(r)] -= f * sol[static_cast<std::size_t>(c)];
            }
        }
        for (int r = p - 1; r >= 0; --r) {
            double acc = sol[static_cast<std::size_t>(r)];
            for (int k = r + 1; k < p; ++k)
                acc -= ata[static_cast<std::size_t>(r) * p + k] * sol[static_cast<std::size_t>(k)];
            sol[static_cast<std::size_t>(r)] = acc / ata[static_cast<std::size_t>(r) * p + r];
        }
        for (int r = 0; r < p; ++r) z[static_cast<std::size_t>(idx[r])] = sol[static_cast<std::size_t>(r)];
    };

    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        // gradient of the residual
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                double ax = 0.0;
                for (int c = 0; c < n; ++c) ax += col(c, i) * x[static_cast<std::size_t>(c)];
                acc += col(j, i) * (b[static_cast<std::size_t>(i)] - ax);
            }
            w[static_cast<std::size_t>(j)] = acc;
        }
        int best = -1;
        double best_w = 1e-12;
        for (int j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && w[static_cast<std::size_t>(j)] > best_w) {
                best_w = w[static_cast<std::size_t>(j)];
                best = j;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            solve_passive(z);
            double alpha = 1.0;
            bool clipped = false;
            for (int j = 0; j < n; ++j) {
                if (!passive[static_cast<std::size_t>(j)] || z[static_cast<std::size_t>(j)] > 0.0)
                    continue;
                const double denom = x[static_cast<std::size_t>(j)] - z[static_cast<std::size_t>(j)];
                if (denom > 0.0)
                    alpha = std::min(alpha, x[static_cast<std::size_t>(j)] / denom);
                clipped = true;
            }
            if (!clipped) {
                x = z;
                break;
            }
            for (int j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)])
                    x[static_cast<std::size_t>(j)] +=
                        alpha * (z[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]);
            for (int j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && x[static_cast<std::size_t>(j)] <= 1e-14) {
                    x[static_cast<std::size_t>(j)] = 0.0;
                    passive[static_cast<std::size_t>(j)] = false;
                }
        }
    }
    return x;
}

}  // namespace cachenet

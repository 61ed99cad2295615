#ifndef JOULEBITS_CHANNEL_HPP
#define JOULEBITS_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "joulebits/errors.hpp"
#include "joulebits/parallel.hpp"
#include "joulebits/prob.hpp"

namespace joulebits {

struct DiscreteChannel {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::vector<double>> matrix;  // rows p(o|a)

    void validate() const {
        if (inputs.empty() || outputs.empty())
            throw validation_error("channel needs at least one input and output");
        if (matrix.size() != inputs.size())
            throw validation_error("channel row count does not match inputs");
        for (const auto& row : matrix) {
            if (row.size() != outputs.size())
                throw validation_error("channel row width does not match outputs");
            double total = 0.0;
            for (double p : row) {
                if (!(p >= 0.0))
                    throw validation_error("negative or non-finite channel entry");
                total += p;
            }
            if (std::abs(total - 1.0) > prob_tolerance)
                throw validation_error("channel row sums to " +
                                       std::to_string(total) + ", not 1");
        }
    }

    bool all_rows_equal() const {
        for (std::size_t a = 1; a < matrix.size(); ++a)
            if (matrix[a] != matrix[0]) return false;
        return true;
    }
};

enum class CostConvention { total, incremental };

inline const char* to_string(CostConvention c) {
    return c == CostConvention::total ? "total" : "incremental";
}

struct CostedChannel {
    DiscreteChannel channel;
    std::vector<double> cost_J;  // raw per-input energy, before convention
    std::optional<std::string> null_input;
    double baseline_energy_J = 0.0;
    CostConvention convention = CostConvention::total;

    void validate() const {
        channel.validate();
        if (cost_J.size() != channel.inputs.size())
            throw validation_error("cost vector length does not match inputs");
        for (double c : cost_J)
            if (!(c >= 0.0))
                throw validation_error("input costs must be >= 0 J");
        if (!(baseline_energy_J >= 0.0))
            throw validation_error("baseline energy must be >= 0 J");
        if (null_input) null_index();  // throws if the label is unknown
    }

    std::size_t null_index() const {
        if (!null_input) throw lookup_error("no null input declared");
        for (std::size_t i = 0; i < channel.inputs.size(); ++i)
            if (channel.inputs[i] == *null_input) return i;
        throw validation_error("null input '" + *null_input +
                               "' is not a channel input");
    }
};

// Per-input energy after applying the accounting convention. Total charges
// the horizon baseline to every input; incremental charges energy beyond the
// declared null input.
inline std::vector<double> effective_costs(const CostedChannel& cch,
                                           CostConvention convention) {
    cch.validate();
    std::vector<double> c(cch.cost_J);
    if (convention == CostConvention::total) {
        for (double& v : c) v += cch.baseline_energy_J;
        return c;
    }
    if (!cch.null_input)
        throw configuration_error(
            "incremental convention requires a declared null input");
    double base = cch.cost_J[cch.null_index()];
    for (double& v : c) {
        v -= base;
        if (v < 0.0)
            throw validation_error(
                "input cheaper than the null action under the incremental "
                "convention; declare the cheaper action as null");
    }
    return c;
}

namespace detail {

// D(row_a || q) in bits, the per-input divergence of the Blahut-Arimoto
// bounds. q must dominate every row in the support sense.
inline double row_divergence(const std::vector<double>& row,
                             const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] > 0.0) d += row[j] * std::log2(row[j] / q[j]);
    return d;
}

inline double info_bits(const std::vector<std::vector<double>>& W,
                        const std::vector<double>& p) {
    const std::size_t m = W[0].size();
    std::vector<double> q(m, 0.0);
    for (std::size_t a = 0; a < W.size(); ++a)
        for (std::size_t j = 0; j < m; ++j) q[j] += p[a] * W[a][j];
    double info = 0.0;
    for (std::size_t a = 0; a < W.size(); ++a)
        if (p[a] > 0.0) info += p[a] * row_divergence(W[a], q);
    return std::max(info, 0.0);
}

struct PenalizedPoint {
    std::vector<double> p;
    double info_bits = 0.0;
    double expected_cost_J = 0.0;
    double gap_bits = 0.0;  // optimality gap of the penalized objective
    bool converged = false;
    std::size_t iterations = 0;
};

// Maximizes I(p) - lambda * E[c](p) by Blahut-Arimoto with an exponential
// cost tilt; the update is done in log domain so large lambda stays stable.
// A warm start floors every input at tiny positive mass: exact zeros are
// absorbing under the multiplicative update and must stay reachable.
inline PenalizedPoint solve_penalized(const std::vector<std::vector<double>>& W,
                                      const std::vector<double>& cost,
                                      double lambda, double tol,
                                      std::size_t max_iter,
                                      const std::vector<double>& init = {}) {
    const std::size_t n = W.size(), m = W[0].size();
    PenalizedPoint out;
    if (init.size() == n) {
        out.p = init;
        double norm = 0.0;
        for (double& v : out.p) norm += (v = std::max(v, 1e-12));
        for (double& v : out.p) v /= norm;
    } else {
        out.p.assign(n, 1.0 / static_cast<double>(n));
    }
    std::vector<double> q(m), score(n), log2p(n);
    double gap_checkpoint = -1.0;
    for (std::size_t it = 0;; ++it) {
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t j = 0; j < m; ++j) q[j] += out.p[a] * W[a][j];
        double lower = 0.0, upper = -std::numeric_limits<double>::infinity();
        double info = 0.0, ecost = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            double d = row_divergence(W[a], q);
            score[a] = d - lambda * cost[a];
            upper = std::max(upper, score[a]);
            if (out.p[a] > 0.0) {
                lower += out.p[a] * score[a];
                info += out.p[a] * d;
                ecost += out.p[a] * cost[a];
            }
        }
        out.info_bits = std::max(info, 0.0);
        out.expected_cost_J = ecost;
        out.gap_bits = upper - lower;
        out.iterations = it;
        if (out.gap_bits <= tol) {
            out.converged = true;
            return out;
        }
        if (it >= max_iter) return out;
        // Tied scores make the certificate gap decay only polynomially
        // (~1/it^2), never geometrically. Once the rate observed over a
        // checkpoint window rules out reaching tol within max_iter, further
        // iterations cannot certify anything: stop and report the gap.
        if (it > 0 && (it & 8191) == 0) {
            if (gap_checkpoint > 0.0) {
                double factor = gap_checkpoint / out.gap_bits;
                if (factor < 2.0) {
                    double per_window = std::log(std::max(factor, 1.0 + 1e-12));
                    double needed =
                        8192.0 * std::log(out.gap_bits / tol) / per_window;
                    if (needed > static_cast<double>(max_iter - it)) return out;
                }
            }
            gap_checkpoint = out.gap_bits;
        }
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n; ++a) {
            log2p[a] = out.p[a] > 0.0
                           ? std::log2(out.p[a]) + score[a]
                           : -std::numeric_limits<double>::infinity();
            peak = std::max(peak, log2p[a]);
        }
        double norm = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            out.p[a] = std::isfinite(log2p[a]) ? std::exp2(log2p[a] - peak) : 0.0;
            norm += out.p[a];
        }
        for (std::size_t a = 0; a < n; ++a) out.p[a] /= norm;
    }
}

}  // namespace detail

struct BaResult {
    double capacity_bits = 0.0;  // achieved lower bound
    double upper_bound_bits = 0.0;
    FiniteDistribution input_dist;
    std::size_t iterations = 0;
};

inline BaResult ba_capacity(const DiscreteChannel& ch, double tol = 1e-9,
                            std::size_t max_iter = 100000) {
    ch.validate();
    if (!(tol > 0.0)) throw validation_error("tolerance must be > 0");
    BaResult r;
    r.input_dist.outcomes = ch.inputs;
    if (ch.all_rows_equal()) {
        // No input influences the output at all; capacity is exactly zero.
        r.input_dist.probs.assign(ch.inputs.size(),
                                  1.0 / static_cast<double>(ch.inputs.size()));
        return r;
    }
    std::vector<double> zero_cost(ch.inputs.size(), 0.0);
    auto point = detail::solve_penalized(ch.matrix, zero_cost, 0.0, tol, max_iter);
    if (!point.converged)
        throw iteration_limit_error("Blahut-Arimoto did not converge",
                                    point.info_bits,
                                    point.info_bits + point.gap_bits);
    r.capacity_bits = point.info_bits;
    r.upper_bound_bits = point.info_bits + point.gap_bits;
    r.input_dist.probs = std::move(point.p);
    r.iterations = point.iterations;
    return r;
}

struct ConstrainedCapacity {
    double capacity_bits = 0.0;
    FiniteDistribution input_dist;
    double lambda_bits_per_J = 0.0;  // multiplier, the curve slope where smooth
    double expected_cost_J = 0.0;
};

// Maximize I(A;O) subject to E[c(A)] <= budget under the channel's declared
// convention. Either the constraint is slack (lambda 0) or expected cost
// meets the budget within tolerance.
inline ConstrainedCapacity cost_constrained_capacity(const CostedChannel& cch,
                                                     double budget_J,
                                                     double tol = 1e-9) {
    if (!(tol > 0.0)) throw validation_error("tolerance must be > 0");
    const auto cost = effective_costs(cch, cch.convention);
    const auto& W = cch.channel.matrix;
    const std::size_t n = cost.size();

    double min_cost = *std::min_element(cost.begin(), cost.end());
    double cost_scale = std::abs(budget_J);
    for (double c : cost) cost_scale = std::max(cost_scale, std::abs(c));
    const double budget_tol = 1e-9 * std::max(cost_scale, 1e-300);
    if (budget_J < min_cost - budget_tol)
        throw infeasibility_error("budget below minimum expected cost",
                                  min_cost);

    const double inner_tol = std::min(tol, 1e-10);
    const std::size_t inner_iter = 500000;

    auto finish = [&](const std::vector<double>& p, double info, double ecost,
                      double lambda) {
        ConstrainedCapacity r;
        r.capacity_bits = info;
        r.input_dist.outcomes = cch.channel.inputs;
        r.input_dist.probs = p;
        r.lambda_bits_per_J = lambda;
        r.expected_cost_J = ecost;
        return r;
    };

    if (cch.channel.all_rows_equal()) {
        std::vector<double> p(n, 0.0);
        p[static_cast<std::size_t>(
            std::min_element(cost.begin(), cost.end()) - cost.begin())] = 1.0;
        return finish(p, 0.0, min_cost, 0.0);
    }

    auto free_point =
        detail::solve_penalized(W, cost, 0.0, inner_tol, inner_iter);
    if (!free_point.converged)
        throw iteration_limit_error("Blahut-Arimoto did not converge",
                                    free_point.info_bits,
                                    free_point.info_bits + free_point.gap_bits);
    if (free_point.expected_cost_J <= budget_J + budget_tol)
        return finish(free_point.p, free_point.info_bits,
                      free_point.expected_cost_J, 0.0);

    if (budget_J <= min_cost + budget_tol) {
        // Only the cheapest inputs are affordable; capacity of their
        // subchannel, with a secant slope back to the unconstrained point.
        std::vector<std::size_t> support;
        for (std::size_t a = 0; a < n; ++a)
            if (cost[a] <= min_cost + budget_tol) support.push_back(a);
        DiscreteChannel sub;
        for (auto a : support) {
            sub.inputs.push_back(cch.channel.inputs[a]);
            sub.matrix.push_back(W[a]);
        }
        sub.outputs = cch.channel.outputs;
        auto sub_res = ba_capacity(sub, tol, inner_iter);
        std::vector<double> p(n, 0.0);
        for (std::size_t k = 0; k < support.size(); ++k)
            p[support[k]] = sub_res.input_dist.probs[k];
        double rise = free_point.info_bits - sub_res.capacity_bits;
        double run = free_point.expected_cost_J - min_cost;
        double lambda = run > 0.0 ? std::max(rise, 0.0) / run : 0.0;
        return finish(p, sub_res.capacity_bits, min_cost, lambda);
    }

    // Bisection on the multiplier: low spends above budget, high below.
    double min_positive = std::numeric_limits<double>::infinity();
    for (double c : cost)
        if (c > 0.0) min_positive = std::min(min_positive, c);
    double lo = 0.0;
    auto lo_pt = free_point;
    double hi = std::isfinite(min_positive)
                    ? std::max(free_point.info_bits / min_positive, 1.0)
                    : 1.0;
    auto hi_pt = detail::solve_penalized(W, cost, hi, inner_tol, inner_iter);
    for (int grow = 0; hi_pt.expected_cost_J > budget_J + budget_tol; ++grow) {
        if (grow > 200)
            throw iteration_limit_error(
                "multiplier bracket did not enclose the budget", lo, hi);
        hi *= 2.0;
        hi_pt = detail::solve_penalized(W, cost, hi, inner_tol, inner_iter,
                                        hi_pt.p);
    }
    if (hi_pt.expected_cost_J >= budget_J - budget_tol)
        return finish(hi_pt.p, hi_pt.info_bits, hi_pt.expected_cost_J, hi);

    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        // Warm start from the nearer bracket endpoint (the previous midpoint).
        auto mid_pt = detail::solve_penalized(
            W, cost, mid, inner_tol, inner_iter,
            mid - lo <= hi - mid ? lo_pt.p : hi_pt.p);
        if (std::abs(mid_pt.expected_cost_J - budget_J) <= budget_tol)
            return finish(mid_pt.p, mid_pt.info_bits, mid_pt.expected_cost_J,
                          mid);
        if (mid_pt.expected_cost_J > budget_J) {
            lo = mid;
            lo_pt = mid_pt;
        } else {
            hi = mid;
            hi_pt = mid_pt;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    }

    // Kink of the capacity-cost curve: the expected cost jumps across the
    // budget as lambda crosses the critical value. Both bracket solutions are
    // optimal there, and expected cost is linear in p, so the exact-budget
    // mixture is optimal too.
    double span = lo_pt.expected_cost_J - hi_pt.expected_cost_J;
    double theta = span > 0.0 ? (budget_J - hi_pt.expected_cost_J) / span : 0.0;
    theta = std::clamp(theta, 0.0, 1.0);
    std::vector<double> p(n);
    for (std::size_t a = 0; a < n; ++a)
        p[a] = theta * lo_pt.p[a] + (1.0 - theta) * hi_pt.p[a];
    double ecost = 0.0;
    for (std::size_t a = 0; a < n; ++a) ecost += p[a] * cost[a];
    return finish(p, detail::info_bits(W, p), ecost, 0.5 * (lo + hi));
}

struct CapacityPerCost {
    double bits_per_joule = 0.0;  // largest finite candidate when unbounded
    bool unbounded = false;
    std::optional<double> relative_entropy_bits_per_joule;  // free-null formula
    FiniteDistribution input_dist;
    std::vector<std::string> warnings;
    std::size_t iterations = 0;
};

// sup over input distributions of I(A;O)/E[c(A)], i.e. the maximal slope of
// the capacity-cost curve through the origin. Solved by Dinkelbach iteration
// on the penalized problem; when a zero-cost null input exists the result is
// cross-checked against max_a D(p(.|a) || p(.|null))/c(a).
inline CapacityPerCost capacity_per_unit_cost(const CostedChannel& cch,
                                              CostConvention convention,
                                              double tol = 1e-9) {
    const auto cost = effective_costs(cch, convention);
    const auto& W = cch.channel.matrix;
    const std::size_t n = cost.size();

    double cost_scale = 0.0;
    for (double c : cost) cost_scale = std::max(cost_scale, c);
    if (cost_scale == 0.0)
        throw degeneracy_error(
            "every input costs zero: bits per joule is unbounded "
            "(free-control artifact)");

    CapacityPerCost out;
    out.input_dist.outcomes = cch.channel.inputs;
    out.input_dist.probs.assign(n, 0.0);

    // A zero-cost subchannel with positive capacity makes the ratio diverge.
    {
        DiscreteChannel free_sub;
        for (std::size_t a = 0; a < n; ++a)
            if (cost[a] == 0.0) {
                free_sub.inputs.push_back(cch.channel.inputs[a]);
                free_sub.matrix.push_back(W[a]);
            }
        if (free_sub.inputs.size() >= 2) {
            free_sub.outputs = cch.channel.outputs;
            if (ba_capacity(free_sub, 1e-9).capacity_bits > 1e-12) {
                out.unbounded = true;
                out.warnings.push_back(
                    "distinct zero-cost inputs give control for free; "
                    "reporting the largest finite single-input candidate");
            }
        }
    }

    // Cross-check route, available when the null input is free under the
    // chosen convention.
    std::optional<std::size_t> free_null;
    if (cch.null_input && cost[cch.null_index()] == 0.0)
        free_null = cch.null_index();
    if (free_null) {
        FiniteDistribution qnull{cch.channel.outputs, W[*free_null]};
        double best = 0.0;
        bool any_finite = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (a == *free_null || cost[a] <= 0.0) continue;
            FiniteDistribution pa{cch.channel.outputs, W[a]};
            double d = kl_divergence(pa, qnull);
            if (std::isinf(d)) {
                out.unbounded = true;
                out.warnings.push_back(
                    "input '" + cch.channel.inputs[a] +
                    "' is deterministically distinguishable from the null; "
                    "capacity per unit cost is unbounded in the "
                    "vanishing-rate limit");
                continue;
            }
            any_finite = true;
            best = std::max(best, d / cost[a]);
        }
        if (any_finite) out.relative_entropy_bits_per_joule = best;
    }

    if (cch.channel.all_rows_equal()) {
        out.input_dist.probs.assign(n, 1.0 / static_cast<double>(n));
        return out;  // no control at any price
    }

    if (out.unbounded) {
        if (out.relative_entropy_bits_per_joule)
            out.bits_per_joule = *out.relative_entropy_bits_per_joule;
        return out;
    }

    const double inner_tol = std::min(tol, 1e-12);
    const std::size_t inner_iter = 500000;
    auto point = detail::solve_penalized(W, cost, 0.0, inner_tol, inner_iter);
    if (point.info_bits <= 1e-15 || point.expected_cost_J <= 0.0) {
        out.input_dist.probs = point.p;
        return out;
    }
    double lambda = point.info_bits / point.expected_cost_J;
    for (std::size_t it = 0; it < 200; ++it) {
        out.iterations = it + 1;
        point = detail::solve_penalized(W, cost, lambda, inner_tol, inner_iter,
                                        point.p);
        if (point.expected_cost_J <= 0.0) break;  // ratio met at zero spend
        double next = point.info_bits / point.expected_cost_J;
        double step = next - lambda;
        lambda = std::max(lambda, next);
        // An inner solve certified to gap g locates the ratio no better than
        // g / E[c]; iterating below that resolution cannot improve lambda.
        double resolvable =
            point.gap_bits / std::max(point.expected_cost_J, 1e-300);
        if (std::abs(step) <= std::max(1e-9 * std::max(1.0, lambda), resolvable))
            break;
    }
    out.bits_per_joule = lambda;
    out.input_dist.probs = point.p;
    if (out.relative_entropy_bits_per_joule) {
        double ref = *out.relative_entropy_bits_per_joule;
        if (std::abs(ref - lambda) > 1e-5 * std::max(1.0, std::abs(ref)))
            out.warnings.push_back(
                "optimizer and relative-entropy routes disagree beyond "
                "tolerance; report both");
    }
    return out;
}

struct CurvePoint {
    double budget_J;
    double capacity_bits;
    double lambda_bits_per_J;
    FiniteDistribution input_dist;
};

struct EmpowermentCurve {
    std::vector<CurvePoint> points;
    CostConvention convention = CostConvention::total;

    bool nondecreasing(double tol = 1e-6) const {
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].capacity_bits < points[i - 1].capacity_bits - tol)
                return false;
        return true;
    }

    // Largest midpoint-concavity violation in bits (0 for concave data).
    double concavity_violation() const {
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < points.size(); ++i) {
            const auto &a = points[i - 1], &b = points[i], &c = points[i + 1];
            double span = c.budget_J - a.budget_J;
            if (span <= 0.0) continue;
            double t = (b.budget_J - a.budget_J) / span;
            double chord = (1.0 - t) * a.capacity_bits + t * c.capacity_bits;
            worst = std::max(worst, chord - b.capacity_bits);
        }
        return worst;
    }
};

inline EmpowermentCurve empowerment_curve(const CostedChannel& cch,
                                          const std::vector<double>& budgets_J,
                                          double tol = 1e-9) {
    if (budgets_J.empty())
        throw validation_error("empowerment curve needs at least one budget");
    for (std::size_t i = 1; i < budgets_J.size(); ++i)
        if (!(budgets_J[i] > budgets_J[i - 1]))
            throw validation_error("budgets must be strictly increasing");
    EmpowermentCurve curve;
    curve.convention = cch.convention;
    curve.points.resize(budgets_J.size());
    parallel_for(budgets_J.size(), [&](std::size_t i) {
        auto r = cost_constrained_capacity(cch, budgets_J[i], tol);
        curve.points[i] = {budgets_J[i], r.capacity_bits, r.lambda_bits_per_J,
                           std::move(r.input_dist)};
    });
    return curve;
}

// -------------------------------------------------------------------------
// MDP unrolling: open-loop action sequences against the horizon-tau endpoint.
// -------------------------------------------------------------------------
enum class Endpoint { observation, state };

struct MdpSpec {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::vector<std::vector<double>>> transition;  // [s][a][s']
    std::vector<std::string> observation_map;  // per state
    std::vector<double> action_cost_J;         // per action
    std::string initial_state;
    int horizon = 1;
    double baseline_energy_J = 0.0;
    std::optional<std::string> null_action;

    std::size_t state_index(const std::string& label) const {
        for (std::size_t s = 0; s < states.size(); ++s)
            if (states[s] == label) return s;
        throw lookup_error("unknown state: " + label);
    }

    void validate() const {
        if (states.empty() || actions.empty())
            throw validation_error("MDP needs states and actions");
        if (horizon < 1) throw validation_error("horizon must be >= 1");
        if (transition.size() != states.size())
            throw validation_error("transition tensor has wrong state count");
        for (const auto& per_state : transition) {
            if (per_state.size() != actions.size())
                throw validation_error("transition tensor has wrong action count");
            for (const auto& row : per_state) {
                if (row.size() != states.size())
                    throw validation_error("transition row has wrong width");
                double total = 0.0;
                for (double p : row) {
                    if (!(p >= 0.0))
                        throw validation_error("negative transition probability");
                    total += p;
                }
                if (std::abs(total - 1.0) > prob_tolerance)
                    throw validation_error("transition row sums to " +
                                           std::to_string(total) + ", not 1");
            }
        }
        if (observation_map.size() != states.size())
            throw validation_error("observation map has wrong length");
        if (action_cost_J.size() != actions.size())
            throw validation_error("action cost vector has wrong length");
        for (double c : action_cost_J)
            if (!(c >= 0.0)) throw validation_error("action costs must be >= 0 J");
        if (!(baseline_energy_J >= 0.0))
            throw validation_error("baseline energy must be >= 0 J");
        state_index(initial_state);
        if (null_action) {
            bool found = false;
            for (const auto& a : actions) found = found || a == *null_action;
            if (!found)
                throw validation_error("null action '" + *null_action +
                                       "' is not an action");
        }
    }
};

// Enumerates every open-loop action sequence of length tau (lexicographic by
// action index) and propagates the state distribution exactly, producing one
// channel row per sequence toward O_tau or S_tau.
inline CostedChannel unroll_mdp(const MdpSpec& m,
                                Endpoint endpoint = Endpoint::observation) {
    m.validate();
    const std::size_t ns = m.states.size(), na = m.actions.size();
    const auto tau = static_cast<std::size_t>(m.horizon);
    double seqs = std::pow(static_cast<double>(na), static_cast<double>(tau));
    if (seqs * static_cast<double>(ns) > 1e7)
        throw capacity_error("unrolled channel too large: |A|^tau * |S| = " +
                             std::to_string(seqs * static_cast<double>(ns)) +
                             " exceeds 1e7");
    const auto nseq = static_cast<std::size_t>(seqs);

    // Output alphabet: states, or observation labels by first appearance.
    std::vector<std::size_t> out_of_state(ns);
    std::vector<std::string> outputs;
    if (endpoint == Endpoint::state) {
        outputs = m.states;
        for (std::size_t s = 0; s < ns; ++s) out_of_state[s] = s;
    } else {
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& label = m.observation_map[s];
            std::size_t k = 0;
            while (k < outputs.size() && outputs[k] != label) ++k;
            if (k == outputs.size()) outputs.push_back(label);
            out_of_state[s] = k;
        }
    }

    CostedChannel cch;
    cch.channel.outputs = outputs;
    cch.channel.inputs.resize(nseq);
    cch.channel.matrix.assign(nseq, std::vector<double>(outputs.size(), 0.0));
    cch.cost_J.resize(nseq);
    cch.baseline_energy_J = m.baseline_energy_J;

    const std::size_t s0 = m.state_index(m.initial_state);
    std::vector<std::size_t> digits(tau);
    std::vector<double> p(ns), pnext(ns);
    for (std::size_t i = 0; i < nseq; ++i) {
        std::size_t rem = i;
        for (std::size_t t = tau; t-- > 0;) {
            digits[t] = rem % na;
            rem /= na;
        }
        std::string label;
        double cost = 0.0;
        std::fill(p.begin(), p.end(), 0.0);
        p[s0] = 1.0;
        for (std::size_t t = 0; t < tau; ++t) {
            const std::size_t a = digits[t];
            if (t) label += ',';
            label += m.actions[a];
            cost += m.action_cost_J[a];
            std::fill(pnext.begin(), pnext.end(), 0.0);
            for (std::size_t s = 0; s < ns; ++s) {
                if (p[s] == 0.0) continue;
                const auto& row = m.transition[s][a];
                for (std::size_t s2 = 0; s2 < ns; ++s2)
                    pnext[s2] += p[s] * row[s2];
            }
            p.swap(pnext);
        }
        cch.channel.inputs[i] = std::move(label);
        cch.cost_J[i] = cost;
        for (std::size_t s = 0; s < ns; ++s)
            cch.channel.matrix[i][out_of_state[s]] += p[s];
    }

    if (m.null_action) {
        std::string label = *m.null_action;
        for (std::size_t t = 1; t < tau; ++t) label += "," + *m.null_action;
        cch.null_input = label;
    }
    return cch;
}

}  // namespace joulebits

#endif  // JOULEBITS_CHANNEL_HPP

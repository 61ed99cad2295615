#ifndef JOULEBITS_PROB_HPP
#define JOULEBITS_PROB_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "joulebits/errors.hpp"

namespace joulebits {

// Normalization tolerance for probability mass.
inline constexpr double prob_tolerance = 1e-12;

namespace detail {

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// p * log2(num/den) with the 0*log0 := 0 convention; caller guarantees
// den > 0 whenever p > 0.
inline double plog2_ratio(double p, double num, double den) {
    if (p <= 0.0) return 0.0;
    return p * std::log2(num / den);
}

}  // namespace detail

// -------------------------------------------------------------------------
// FiniteDistribution: exact probability mass function over labeled outcomes.
// -------------------------------------------------------------------------
struct FiniteDistribution {
    std::vector<std::string> outcomes;
    std::vector<double> probs;

    static FiniteDistribution uniform(std::vector<std::string> labels) {
        FiniteDistribution d;
        d.probs.assign(labels.size(), 1.0 / static_cast<double>(labels.size()));
        d.outcomes = std::move(labels);
        return d;
    }

    static FiniteDistribution point_mass(std::vector<std::string> labels,
                                         std::size_t which) {
        FiniteDistribution d;
        d.probs.assign(labels.size(), 0.0);
        d.probs.at(which) = 1.0;
        d.outcomes = std::move(labels);
        return d;
    }

    std::size_t size() const { return outcomes.size(); }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            if (outcomes[i] == label) return i;
        throw lookup_error("unknown outcome: " + label);
    }

    void validate() const {
        if (outcomes.empty())
            throw validation_error("distribution has no outcomes");
        if (outcomes.size() != probs.size())
            throw validation_error("outcome/probability length mismatch");
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0))
                throw validation_error("negative or non-finite probability mass");
            total += p;
        }
        if (std::abs(total - 1.0) > prob_tolerance)
            throw validation_error("probabilities sum to " + std::to_string(total) +
                                   ", not 1");
    }
};

// Shannon entropy in bits.
inline double entropy(const FiniteDistribution& d) {
    d.validate();
    double h = 0.0;
    for (double p : d.probs) h -= detail::xlog2x(p);
    return std::max(h, 0.0);
}

// D(p || q) in bits. Returns +infinity when q(x) = 0 < p(x) (absolute
// continuity failure); callers that sweep candidate symbols can skip the
// sentinel instead of handling an exception.
inline double kl_divergence(const FiniteDistribution& p,
                            const FiniteDistribution& q) {
    p.validate();
    q.validate();
    if (p.outcomes != q.outcomes)
        throw validation_error("kl_divergence: alphabets differ");
    double d = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] <= 0.0) continue;
        if (q.probs[i] <= 0.0) return std::numeric_limits<double>::infinity();
        d += p.probs[i] * std::log2(p.probs[i] / q.probs[i]);
    }
    return std::max(d, 0.0);
}

// -------------------------------------------------------------------------
// JointTable: dense joint mass over named finite variables, row-major with
// the last variable fastest.
// -------------------------------------------------------------------------
struct JointTable {
    std::vector<std::string> variable_names;
    std::vector<std::vector<std::string>> axis_alphabets;
    std::vector<double> cells;

    std::size_t num_vars() const { return variable_names.size(); }

    std::size_t axis_size(std::size_t v) const { return axis_alphabets[v].size(); }

    std::size_t var_index(const std::string& name) const {
        for (std::size_t i = 0; i < variable_names.size(); ++i)
            if (variable_names[i] == name) return i;
        throw lookup_error("unknown variable: " + name);
    }

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (const auto& a : axis_alphabets) n *= a.size();
        return n;
    }

    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(num_vars(), 1);
        for (std::size_t i = num_vars(); i-- > 1;)
            s[i - 1] = s[i] * axis_size(i);
        return s;
    }

    double& at(const std::vector<std::size_t>& idx) {
        return cells[flat_index(idx)];
    }
    double at(const std::vector<std::size_t>& idx) const {
        return cells[flat_index(idx)];
    }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const {
        auto s = strides();
        std::size_t f = 0;
        for (std::size_t v = 0; v < idx.size(); ++v) f += idx[v] * s[v];
        return f;
    }

    static JointTable zeros(std::vector<std::string> names,
                            std::vector<std::vector<std::string>> alphabets) {
        JointTable j;
        j.variable_names = std::move(names);
        j.axis_alphabets = std::move(alphabets);
        j.cells.assign(j.cell_count(), 0.0);
        return j;
    }

    void validate() const {
        if (variable_names.empty())
            throw validation_error("joint table has no variables");
        if (variable_names.size() != axis_alphabets.size())
            throw validation_error("variable/alphabet count mismatch");
        std::unordered_set<std::string> seen;
        for (const auto& n : variable_names)
            if (!seen.insert(n).second)
                throw validation_error("duplicate variable name: " + n);
        for (const auto& a : axis_alphabets) {
            if (a.empty()) throw validation_error("empty axis alphabet");
            std::unordered_set<std::string> labels;
            for (const auto& l : a)
                if (!labels.insert(l).second)
                    throw validation_error("duplicate outcome label: " + l);
        }
        if (cells.size() != cell_count())
            throw validation_error("cell count does not match alphabet sizes");
        double total = 0.0;
        for (double c : cells) {
            if (!(c >= 0.0))
                throw validation_error("negative or non-finite cell mass");
            total += c;
        }
        if (std::abs(total - 1.0) > prob_tolerance)
            throw validation_error("joint mass sums to " + std::to_string(total) +
                                   ", not 1");
    }

    // Marginal over the named variables, in the order given.
    JointTable marginal(const std::vector<std::string>& keep) const {
        std::vector<std::size_t> kept;
        kept.reserve(keep.size());
        for (const auto& name : keep) kept.push_back(var_index(name));

        std::vector<std::vector<std::string>> alphabets;
        alphabets.reserve(kept.size());
        for (auto v : kept) alphabets.push_back(axis_alphabets[v]);
        JointTable out = zeros(keep, alphabets);

        const auto src_strides = strides();
        const auto dst_strides = out.strides();
        const std::size_t n = cells.size();
        std::vector<std::size_t> idx(num_vars(), 0);
        for (std::size_t flat = 0; flat < n; ++flat) {
            std::size_t dst = 0;
            for (std::size_t k = 0; k < kept.size(); ++k)
                dst += idx[kept[k]] * dst_strides[k];
            out.cells[dst] += cells[flat];
            // odometer increment
            for (std::size_t v = num_vars(); v-- > 0;) {
                if (++idx[v] < axis_size(v)) break;
                idx[v] = 0;
            }
        }
        return out;
    }

    FiniteDistribution marginal_distribution(const std::string& name) const {
        JointTable m = marginal({name});
        FiniteDistribution d;
        d.outcomes = m.axis_alphabets[0];
        d.probs = m.cells;
        return d;
    }
};

// I(A;B) in bits; any further variables are marginalized out first.
inline double mutual_information(const JointTable& j, const std::string& var_a,
                                 const std::string& var_b) {
    j.validate();
    if (var_a == var_b)
        throw validation_error("mutual_information: variables must be distinct");
    JointTable ab = j.marginal({var_a, var_b});
    const std::size_t na = ab.axis_size(0), nb = ab.axis_size(1);
    std::vector<double> pa(na, 0.0), pb(nb, 0.0);
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            pa[a] += ab.cells[a * nb + b];
            pb[b] += ab.cells[a * nb + b];
        }
    double info = 0.0;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            double p = ab.cells[a * nb + b];
            info += detail::plog2_ratio(p, p, pa[a] * pb[b]);
        }
    return std::max(info, 0.0);
}

// I(A;B|C) = sum_c p(c) I(A;B|C=c), in bits.
inline double conditional_mi(const JointTable& j, const std::string& var_a,
                             const std::string& var_b, const std::string& cond) {
    j.validate();
    if (var_a == var_b || var_a == cond || var_b == cond)
        throw validation_error("conditional_mi: variables must be distinct");
    JointTable abc = j.marginal({var_a, var_b, cond});
    const std::size_t na = abc.axis_size(0), nb = abc.axis_size(1),
                      nc = abc.axis_size(2);
    std::vector<double> pac(na * nc, 0.0), pbc(nb * nc, 0.0), pc(nc, 0.0);
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t c = 0; c < nc; ++c) {
                double p = abc.cells[(a * nb + b) * nc + c];
                pac[a * nc + c] += p;
                pbc[b * nc + c] += p;
                pc[c] += p;
            }
    double info = 0.0;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t c = 0; c < nc; ++c) {
                double p = abc.cells[(a * nb + b) * nc + c];
                info += detail::plog2_ratio(p, pc[c] * p,
                                            pac[a * nc + c] * pbc[b * nc + c]);
            }
    return std::max(info, 0.0);
}

// -------------------------------------------------------------------------
// Quantizer: fixed left-closed right-open binning of reals.
// -------------------------------------------------------------------------
enum class ClampPolicy { clamp_to_edge, error };

struct Quantizer {
    double bin_width = 1.0;  // epsilon, in units of the quantized variable
    double origin = 0.0;
    std::size_t num_bins = 1;
    ClampPolicy clamp_policy = ClampPolicy::clamp_to_edge;

    void validate() const {
        if (!(bin_width > 0.0)) throw validation_error("bin_width must be > 0");
        if (num_bins < 1) throw validation_error("num_bins must be >= 1");
    }

    // Bin of x: floor((x - origin) / bin_width), boundary values round up.
    std::size_t quantize_one(double x) const {
        double raw = std::floor((x - origin) / bin_width);
        if (raw < 0.0 || raw >= static_cast<double>(num_bins)) {
            if (clamp_policy == ClampPolicy::error)
                throw range_error("value " + std::to_string(x) +
                                  " outside quantizer range");
            return raw < 0.0 ? 0 : num_bins - 1;
        }
        return static_cast<std::size_t>(raw);
    }
};

inline std::vector<std::size_t> quantize(const std::vector<double>& xs,
                                         const Quantizer& q) {
    q.validate();
    std::vector<std::size_t> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(q.quantize_one(x));
    return out;
}

// Merge outcomes of one axis. outcome_to_bin[i] gives the coarse bin of
// outcome i; bins index into bin_labels.
inline JointTable coarsen_axis(const JointTable& j, const std::string& var,
                               const std::vector<std::size_t>& outcome_to_bin,
                               const std::vector<std::string>& bin_labels) {
    const std::size_t v = j.var_index(var);
    if (outcome_to_bin.size() != j.axis_size(v))
        throw validation_error("coarsen_axis: mapping length mismatch");
    for (auto b : outcome_to_bin)
        if (b >= bin_labels.size())
            throw validation_error("coarsen_axis: bin index out of range");

    auto alphabets = j.axis_alphabets;
    alphabets[v] = bin_labels;
    JointTable out = JointTable::zeros(j.variable_names, alphabets);

    const auto dst_strides = out.strides();
    std::vector<std::size_t> idx(j.num_vars(), 0);
    for (std::size_t flat = 0; flat < j.cells.size(); ++flat) {
        std::size_t dst = 0;
        for (std::size_t k = 0; k < j.num_vars(); ++k) {
            std::size_t component = (k == v) ? outcome_to_bin[idx[k]] : idx[k];
            dst += component * dst_strides[k];
        }
        out.cells[dst] += j.cells[flat];
        for (std::size_t k = j.num_vars(); k-- > 0;) {
            if (++idx[k] < j.axis_size(k)) break;
            idx[k] = 0;
        }
    }
    return out;
}

// Coarsen an axis whose labels are numeric strings by running them through
// a quantizer. Bin b is labeled "bin<b>".
inline JointTable quantize_axis(const JointTable& j, const std::string& var,
                                const Quantizer& q) {
    q.validate();
    const std::size_t v = j.var_index(var);
    std::vector<std::size_t> mapping;
    mapping.reserve(j.axis_size(v));
    for (const auto& label : j.axis_alphabets[v]) {
        double x;
        try {
            x = std::stod(label);
        } catch (const std::exception&) {
            throw validation_error("quantize_axis: outcome label '" + label +
                                   "' of variable " + var + " is not numeric");
        }
        mapping.push_back(q.quantize_one(x));
    }
    std::vector<std::string> bin_labels;
    bin_labels.reserve(q.num_bins);
    for (std::size_t b = 0; b < q.num_bins; ++b)
        bin_labels.push_back("bin" + std::to_string(b));
    return coarsen_axis(j, var, mapping, bin_labels);
}

}  // namespace joulebits

#endif  // JOULEBITS_PROB_HPP

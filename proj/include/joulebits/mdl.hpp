#ifndef JOULEBITS_MDL_HPP
#define JOULEBITS_MDL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "joulebits/errors.hpp"

namespace joulebits {

struct TokenStream {
    std::vector<std::string> alphabet;
    std::vector<std::size_t> tokens;  // indices into alphabet

    std::size_t size() const { return tokens.size(); }

    void validate() const {
        if (alphabet.empty()) throw validation_error("empty token alphabet");
        if (tokens.empty()) throw validation_error("token stream is empty");
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            for (std::size_t j = i + 1; j < alphabet.size(); ++j)
                if (alphabet[i] == alphabet[j])
                    throw validation_error("duplicate alphabet symbol: " +
                                           alphabet[i]);
        for (auto t : tokens)
            if (t >= alphabet.size())
                throw validation_error("token index outside alphabet");
    }

    static TokenStream from_symbols(std::vector<std::string> alphabet,
                                    const std::vector<std::string>& symbols) {
        TokenStream s;
        s.alphabet = std::move(alphabet);
        s.tokens.reserve(symbols.size());
        for (const auto& sym : symbols) {
            std::size_t k = 0;
            while (k < s.alphabet.size() && s.alphabet[k] != sym) ++k;
            if (k == s.alphabet.size())
                throw validation_error("token '" + sym +
                                       "' is not in the alphabet");
            s.tokens.push_back(k);
        }
        s.validate();
        return s;
    }

    // One symbol per byte. When no alphabet is given, the sorted set of bytes
    // present becomes the alphabet.
    static TokenStream from_text(std::string_view text,
                                 std::optional<std::string> alphabet = {}) {
        std::string chars;
        if (alphabet) {
            chars = *alphabet;
        } else {
            bool seen[256] = {};
            for (unsigned char c : text) seen[c] = true;
            for (int c = 0; c < 256; ++c)
                if (seen[c]) chars.push_back(static_cast<char>(c));
        }
        TokenStream s;
        std::size_t index_of[256];
        std::fill(std::begin(index_of), std::end(index_of), std::size_t(-1));
        for (std::size_t i = 0; i < chars.size(); ++i) {
            s.alphabet.push_back(std::string(1, chars[i]));
            index_of[static_cast<unsigned char>(chars[i])] = i;
        }
        s.tokens.reserve(text.size());
        for (unsigned char c : text) {
            if (index_of[c] == std::size_t(-1))
                throw validation_error(std::string("byte '") +
                                       static_cast<char>(c) +
                                       "' is not in the alphabet");
            s.tokens.push_back(index_of[c]);
        }
        s.validate();
        return s;
    }
};

struct ModelBudget {
    int max_order = 0;                           // Markov order cap k
    std::optional<double> param_resolution_bits; // per-parameter code length
    std::string notes;                           // free-text budget statement

    void validate(std::size_t alphabet_size) const {
        if (max_order < 0) throw validation_error("max_order must be >= 0");
        double params = static_cast<double>(alphabet_size - 1) *
                        std::pow(static_cast<double>(alphabet_size),
                                 static_cast<double>(max_order));
        if (params > 1e6)
            throw validation_error(
                "parameter count at max_order exceeds 1e6");
        if (param_resolution_bits && !(*param_resolution_bits >= 0.0))
            throw validation_error("param_resolution_bits must be >= 0");
    }
};

// Total KT (add-one-half) code length of the stream with length-k contexts;
// the first t < k tokens use their shorter available context.
inline double prequential_code_length(const TokenStream& s, int order) {
    s.validate();
    if (order < 0) throw validation_error("order must be >= 0");
    const auto k = static_cast<std::size_t>(order);
    const double half_alpha = 0.5 * static_cast<double>(s.alphabet.size());
    std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> counts;
    std::vector<std::size_t> ctx;
    double bits = 0.0;
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
        const std::size_t len = std::min(t, k);
        ctx.assign(s.tokens.begin() + static_cast<std::ptrdiff_t>(t - len),
                   s.tokens.begin() + static_cast<std::ptrdiff_t>(t));
        auto& c = counts[ctx];
        if (c.empty()) c.assign(s.alphabet.size(), 0);
        std::uint64_t total = 0;
        for (auto n : c) total += n;
        double p = (static_cast<double>(c[s.tokens[t]]) + 0.5) /
                   (static_cast<double>(total) + half_alpha);
        bits -= std::log2(p);
        ++c[s.tokens[t]];
    }
    return bits;
}

struct MdlReport {
    double L_M_bits = 0.0;          // structural part (model code)
    double L_X_given_M_bits = 0.0;  // data given model
    double total_bits = 0.0;
    int chosen_order = 0;
};

namespace detail {

// Data code length under the maximum-likelihood order-k Markov model. The
// first k tokens are coded uniformly; conditional probabilities are
// optionally quantized to param_resolution_bits per parameter.
inline double ml_code_length(const TokenStream& s, std::size_t k,
                             std::optional<double> resolution_bits) {
    const double log_alpha = std::log2(static_cast<double>(s.alphabet.size()));
    double bits = static_cast<double>(std::min(k, s.tokens.size())) * log_alpha;
    std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> counts;
    for (std::size_t t = k; t < s.tokens.size(); ++t) {
        std::vector<std::size_t> ctx(
            s.tokens.begin() + static_cast<std::ptrdiff_t>(t - k),
            s.tokens.begin() + static_cast<std::ptrdiff_t>(t));
        auto& c = counts[ctx];
        if (c.empty()) c.assign(s.alphabet.size(), 0);
        ++c[s.tokens[t]];
    }
    for (const auto& [ctx, c] : counts) {
        std::uint64_t total = 0;
        for (auto n : c) total += n;
        if (total == 0) continue;
        if (!resolution_bits) {
            for (auto n : c)
                if (n > 0)
                    bits += static_cast<double>(n) *
                            std::log2(static_cast<double>(total) /
                                      static_cast<double>(n));
            continue;
        }
        // Quantized parameters: round each ML probability to a grid of
        // 2^resolution steps, never dropping a symbol that actually occurs.
        const double grid = std::exp2(*resolution_bits);
        std::vector<double> q(c.size(), 0.0);
        double qsum = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            double ml = static_cast<double>(c[i]) / static_cast<double>(total);
            q[i] = std::round(ml * grid);
            if (c[i] > 0 && q[i] < 1.0) q[i] = 1.0;
            qsum += q[i];
        }
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] > 0)
                bits += static_cast<double>(c[i]) * std::log2(qsum / q[i]);
    }
    return bits;
}

inline double structure_bits(std::size_t alphabet_size, std::size_t k,
                             std::size_t n_tokens, int max_order,
                             std::optional<double> resolution_bits) {
    double params = static_cast<double>(alphabet_size - 1) *
                    std::pow(static_cast<double>(alphabet_size),
                             static_cast<double>(k));
    double order_code = std::log2(static_cast<double>(max_order) + 1.0);
    if (resolution_bits) return params * *resolution_bits + order_code;
    return 0.5 * params * std::log2(static_cast<double>(n_tokens)) + order_code;
}

}  // namespace detail

// Two-part code: min over orders 0..max_order of L(M) + L(X|M). Ties go to
// the smaller order.
inline MdlReport two_part_mdl(const TokenStream& s, const ModelBudget& b) {
    s.validate();
    b.validate(s.alphabet.size());
    MdlReport best;
    bool have = false;
    for (int k = 0; k <= b.max_order; ++k) {
        MdlReport r;
        r.chosen_order = k;
        r.L_M_bits = detail::structure_bits(s.alphabet.size(),
                                            static_cast<std::size_t>(k),
                                            s.size(), b.max_order,
                                            b.param_resolution_bits);
        r.L_X_given_M_bits = detail::ml_code_length(
            s, static_cast<std::size_t>(k), b.param_resolution_bits);
        r.total_bits = r.L_M_bits + r.L_X_given_M_bits;
        if (!have || r.total_bits < best.total_bits) {
            best = r;
            have = true;
        }
    }
    return best;
}

// N * (ell0 - ell): bits saved against the baseline per-token rate. Negative
// gains are reported, not clamped.
inline double compression_gain(double ell0_bits_per_token,
                               double ell_bits_per_token, std::size_t n_tokens) {
    if (n_tokens < 1) throw validation_error("token count must be >= 1");
    return static_cast<double>(n_tokens) *
           (ell0_bits_per_token - ell_bits_per_token);
}

inline double eta_e_mdl(double gain_bits, double E_train_J) {
    if (!(E_train_J > 0.0))
        throw validation_error("training energy must be > 0 J");
    return gain_bits / E_train_J;
}

// ell(C) = ell_inf + a C^-alpha with declared energy model E_train = kappa C.
struct ScalingFit {
    double ell_inf = 0.0;  // bits/token floor
    double a = 1.0;
    double alpha = 1.0;
    double kappa = 1.0;    // J per compute unit, user-declared
};

struct ScalingFitResult {
    ScalingFit fit;
    double residual_rms_bits_per_token = 0.0;
    std::optional<std::string> warning;
};

namespace detail {

struct LogLinearFit {
    double intercept, slope, sse;
};

// Regression of ln(ell - ell_inf) on ln C.
inline LogLinearFit log_fit(const std::vector<std::pair<double, double>>& pts,
                            double ell_inf) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(pts.size());
    for (const auto& [c, ell] : pts) {
        double x = std::log(c), y = std::log(ell - ell_inf);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double sse = 0;
    for (const auto& [c, ell] : pts) {
        double r = std::log(ell - ell_inf) - (intercept + slope * std::log(c));
        sse += r * r;
    }
    return {intercept, slope, sse};
}

}  // namespace detail

inline ScalingFitResult fit_scaling(
    const std::vector<std::pair<double, double>>& points, double kappa,
    double warn_residual_bits = 1e-3) {
    if (points.size() < 4)
        throw validation_error("scaling fit needs at least 4 points");
    if (!(kappa > 0.0)) throw validation_error("kappa must be > 0 J");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
            throw validation_error("scaling points must be positive");
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw validation_error("compute values must be strictly increasing");
        if (i > 0 && !(points[i].second < points[i - 1].second))
            throw validation_error("loss values must be strictly decreasing");
    }
    double ell_min = points.back().second;
    double hi = ell_min - 1e-12 * std::max(1.0, ell_min);
    if (hi <= 0.0) hi = 0.5 * ell_min;

    auto objective = [&](double e) { return detail::log_fit(points, e).sse; };

    // Coarse scan for the basin, then golden-section refinement.
    const int scan = 512;
    double best_e = 0.0, best_sse = objective(0.0);
    for (int i = 1; i <= scan; ++i) {
        double e = hi * static_cast<double>(i) / static_cast<double>(scan);
        double sse = objective(e);
        if (sse < best_sse) {
            best_sse = sse;
            best_e = e;
        }
    }
    double step = hi / static_cast<double>(scan);
    double lo_b = std::max(0.0, best_e - step), hi_b = std::min(hi, best_e + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi_b - gr * (hi_b - lo_b), x2 = lo_b + gr * (hi_b - lo_b);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 200 && hi_b - lo_b > 1e-15 * std::max(1.0, hi_b);
         ++it) {
        if (f1 < f2) {
            hi_b = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi_b - gr * (hi_b - lo_b);
            f1 = objective(x1);
        } else {
            lo_b = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo_b + gr * (hi_b - lo_b);
            f2 = objective(x2);
        }
    }
    double ell_inf = 0.5 * (lo_b + hi_b);
    if (objective(best_e) < objective(ell_inf)) ell_inf = best_e;

    auto line = detail::log_fit(points, ell_inf);
    ScalingFitResult out;
    out.fit.ell_inf = ell_inf;
    out.fit.alpha = -line.slope;
    out.fit.a = std::exp(line.intercept);
    out.fit.kappa = kappa;
    if (!(out.fit.alpha > 0.0) || !(out.fit.a > 0.0))
        throw validation_error("fit did not produce a decaying power law");
    double sse_bits = 0.0;
    for (const auto& [c, ell] : points) {
        double model = ell_inf + out.fit.a * std::pow(c, -out.fit.alpha);
        sse_bits += (model - ell) * (model - ell);
    }
    out.residual_rms_bits_per_token =
        std::sqrt(sse_bits / static_cast<double>(points.size()));
    if (out.residual_rms_bits_per_token > warn_residual_bits)
        out.warning = "fit residual " +
                      std::to_string(out.residual_rms_bits_per_token) +
                      " bits/token exceeds " +
                      std::to_string(warn_residual_bits);
    return out;
}

// -N * dl/dC / kappa = N a alpha C^-(alpha+1) / kappa, in bits per joule of
// additional training energy.
inline double marginal_bits_per_joule(const ScalingFit& f, double C,
                                      std::size_t n_tokens) {
    if (!(C > 0.0)) throw validation_error("compute must be > 0");
    if (!(f.kappa > 0.0)) throw validation_error("kappa must be > 0 J");
    return static_cast<double>(n_tokens) * f.a * f.alpha *
           std::pow(C, -(f.alpha + 1.0)) / f.kappa;
}

}  // namespace joulebits

#endif  // JOULEBITS_MDL_HPP

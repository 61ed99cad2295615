#ifndef JOULEBITS_EPIPLEXITY_HPP
#define JOULEBITS_EPIPLEXITY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "joulebits/errors.hpp"
#include "joulebits/prob.hpp"
#include "joulebits/thermo.hpp"

namespace joulebits {

// Latent Z with prior p(z) and data model p(x|z). Z is part of the benchmark
// specification, never inferred.
struct GenerativeEnv {
    std::vector<std::string> latent_alphabet;          // Z
    FiniteDistribution prior;                          // over Z
    std::vector<std::string> x_alphabet;               // data records X
    std::vector<std::vector<double>> obs_model;        // rows p(x|z)

    void validate() const {
        if (latent_alphabet.empty() || x_alphabet.empty())
            throw validation_error("environment needs latent and data alphabets");
        prior.validate();
        if (prior.outcomes != latent_alphabet)
            throw validation_error("prior alphabet does not match latent labels");
        if (obs_model.size() != latent_alphabet.size())
            throw validation_error("obs_model row count does not match |Z|");
        for (const auto& row : obs_model) {
            if (row.size() != x_alphabet.size())
                throw validation_error("obs_model row width does not match |X|");
            double total = 0.0;
            for (double p : row) {
                if (!(p >= 0.0))
                    throw validation_error("negative obs_model probability");
                total += p;
            }
            if (std::abs(total - 1.0) > prob_tolerance)
                throw validation_error("obs_model row sums to " +
                                       std::to_string(total) + ", not 1");
        }
    }

    // Latent pairs with identical data models: candidates for a more minimal
    // Z. Reported as a warning, never auto-merged.
    std::vector<std::pair<std::string, std::string>> duplicate_latents() const {
        std::vector<std::pair<std::string, std::string>> dups;
        for (std::size_t i = 0; i < obs_model.size(); ++i)
            for (std::size_t j = i + 1; j < obs_model.size(); ++j)
                if (obs_model[i] == obs_model[j])
                    dups.emplace_back(latent_alphabet[i], latent_alphabet[j]);
        return dups;
    }
};

// Learner state W with a stochastic update kernel and a declared energy
// ledger for one episode.
struct LearnerSpec {
    std::vector<std::string> state_alphabet;  // W
    FiniteDistribution initial;               // over W_pre
    // update[w_pre][x] is a distribution over w_post
    std::vector<std::vector<std::vector<double>>> update;
    EnergyLedger episode_energy;

    void validate(std::size_t x_count) const {
        if (state_alphabet.empty())
            throw validation_error("learner needs at least one state");
        initial.validate();
        if (initial.outcomes != state_alphabet)
            throw validation_error("initial distribution does not match states");
        if (update.size() != state_alphabet.size())
            throw validation_error("update kernel has wrong w_pre count");
        for (const auto& per_w : update) {
            if (per_w.size() != x_count)
                throw validation_error("update kernel has wrong x count");
            for (const auto& row : per_w) {
                if (row.size() != state_alphabet.size())
                    throw validation_error("update row has wrong w_post width");
                double total = 0.0;
                for (double p : row) {
                    if (!(p >= 0.0))
                        throw validation_error("negative update probability");
                    total += p;
                }
                if (std::abs(total - 1.0) > prob_tolerance)
                    throw validation_error("update row sums to " +
                                           std::to_string(total) + ", not 1");
            }
        }
        episode_energy.validate();
    }
};

// Exact joint p(z, w_pre, x, w_post) for one passive learning episode.
struct EpisodeJoint {
    JointTable joint;  // variables Z, W_pre, X, W_post in that order
};

inline EpisodeJoint build_episode_joint(const GenerativeEnv& env,
                                        const LearnerSpec& learner) {
    env.validate();
    learner.validate(env.x_alphabet.size());
    const std::size_t nz = env.latent_alphabet.size();
    const std::size_t nw = learner.state_alphabet.size();
    const std::size_t nx = env.x_alphabet.size();
    if (static_cast<double>(nz) * nw * nw * nx > 1e7)
        throw capacity_error("episode joint exceeds 1e7 cells");

    EpisodeJoint ep;
    ep.joint = JointTable::zeros(
        {"Z", "W_pre", "X", "W_post"},
        {env.latent_alphabet, learner.state_alphabet, env.x_alphabet,
         learner.state_alphabet});
    auto& cells = ep.joint.cells;
    std::size_t flat = 0;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t w = 0; w < nw; ++w)
            for (std::size_t x = 0; x < nx; ++x) {
                double base = env.prior.probs[z] * learner.initial.probs[w] *
                              env.obs_model[z][x];
                for (std::size_t w2 = 0; w2 < nw; ++w2)
                    cells[flat++] = base * learner.update[w][x][w2];
            }
    return ep;
}

// Acquired epiplexity Delta I = I(W_post; Z | W_pre), optionally after
// coarse-graining named variables (the epsilon-quantized variant). Quantized
// variables must carry numeric outcome labels.
inline double acquired_epiplexity(
    const EpisodeJoint& ep,
    const std::vector<std::pair<std::string, Quantizer>>& quantizers = {}) {
    JointTable j = ep.joint;
    for (const auto& [var, q] : quantizers) j = quantize_axis(j, var, q);
    return conditional_mi(j, "W_post", "Z", "W_pre");
}

// Signed change I(W_post;Z) - I(W_pre;Z); negative values expose forgetting
// that the nonnegative Delta I cannot.
inline double signed_epiplexity_change(const EpisodeJoint& ep) {
    return mutual_information(ep.joint, "W_post", "Z") -
           mutual_information(ep.joint, "W_pre", "Z");
}

namespace detail {

// Checks the passive factorization p(z,w,x,w') =
// p(z) p(w) p(x|z) p(w'|w,x) cell by cell against the joint's own
// conditionals.
inline bool passively_generated(const JointTable& j, double tol = 1e-12) {
    JointTable pz = j.marginal({"Z"});
    JointTable pw = j.marginal({"W_pre"});
    JointTable pzx = j.marginal({"Z", "X"});
    JointTable pwxw = j.marginal({"W_pre", "X", "W_post"});
    JointTable pwx = j.marginal({"W_pre", "X"});
    const std::size_t nz = pz.cells.size(), nw = pw.cells.size();
    const std::size_t nx = pzx.cells.size() / nz;
    std::size_t flat = 0;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t w = 0; w < nw; ++w)
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t w2 = 0; w2 < nw; ++w2, ++flat) {
                    double x_given_z =
                        pz.cells[z] > 0.0 ? pzx.cells[z * nx + x] / pz.cells[z]
                                          : 0.0;
                    double wx = pwx.cells[w * nx + x];
                    double post_given =
                        wx > 0.0 ? pwxw.cells[(w * nx + x) * nw + w2] / wx : 0.0;
                    double model =
                        pz.cells[z] * pw.cells[w] * x_given_z * post_given;
                    if (std::abs(model - j.cells[flat]) > tol) return false;
                }
    return true;
}

}  // namespace detail

struct DpiBound {
    double delta_I_bits;
    double bound_bits;  // I(X; Z | W_pre)
};

// Delta I can never exceed the information the data itself carries about Z.
// Only defined for passively generated episodes; interactive generation needs
// a declared policy class and is rejected.
inline DpiBound dpi_bound(const EpisodeJoint& ep) {
    ep.joint.validate();
    if (!detail::passively_generated(ep.joint))
        throw convention_error(
            "episode joint is not passively generated; declare the policy "
            "class and use an interactive convention");
    DpiBound r{conditional_mi(ep.joint, "W_post", "Z", "W_pre"),
               conditional_mi(ep.joint, "X", "Z", "W_pre")};
    if (r.delta_I_bits > r.bound_bits + 1e-9)
        throw error("data processing inequality violated numerically");
    return r;
}

struct EfficiencyRecord {
    double delta_I_bits = 0.0;
    double E_cons_J = 0.0;
    double Q_diss_J = 0.0;
    double eta_E_bits_per_J = 0.0;
    std::optional<double> eta_tilde_E_bits_per_J;  // only when Q_diss > 0
    std::optional<double> landauer_fraction;       // eta_tilde * k_B T ln2
};

inline EfficiencyRecord learning_efficiency(double delta_I_bits,
                                            const EnergyLedger& ledger) {
    ledger.validate();
    if (!(ledger.E_cons_J > 0.0))
        throw validation_error("learning efficiency needs E_cons > 0");
    EfficiencyRecord r;
    r.delta_I_bits = delta_I_bits;
    r.E_cons_J = ledger.E_cons_J;
    r.Q_diss_J = ledger.Q_diss_J;
    r.eta_E_bits_per_J = delta_I_bits / ledger.E_cons_J;
    if (ledger.Q_diss_J > 0.0) {
        r.eta_tilde_E_bits_per_J = delta_I_bits / ledger.Q_diss_J;
        r.landauer_fraction = *r.eta_tilde_E_bits_per_J *
                              landauer_joules_per_bit(ledger.temperature_K);
    }
    return r;
}

}  // namespace joulebits

#endif  // JOULEBITS_EPIPLEXITY_HPP

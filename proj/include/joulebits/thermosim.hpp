#ifndef JOULEBITS_THERMOSIM_HPP
#define JOULEBITS_THERMOSIM_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "joulebits/errors.hpp"
#include "joulebits/prob.hpp"
#include "joulebits/thermo.hpp"

namespace joulebits {

// Bipartite learner: W relaxes in contact with the bath while the data value
// X stays fixed for the whole episode. Jump rates use the symmetric
// detailed-balance split, so heat exchanged with the bath is well defined.
struct BipartiteProcess {
    std::vector<std::string> w_states;
    std::vector<std::string> x_states;
    std::vector<std::vector<double>> energy_J;  // E[w][x]
    FiniteDistribution data_dist;               // over X, fixed per episode
    double w_rate_scale_hz = 1.0;
    double temperature_K = 300.0;
    FiniteDistribution w_init;                  // over W_pre

    void validate() const {
        if (w_states.empty() || x_states.empty())
            throw validation_error("process needs W and X states");
        if (w_states.size() > 64 || x_states.size() > 64)
            throw validation_error("exact propagation is limited to 64 states");
        if (energy_J.size() != w_states.size())
            throw validation_error("energy table has wrong W count");
        for (const auto& row : energy_J) {
            if (row.size() != x_states.size())
                throw validation_error("energy table has wrong X count");
            for (double e : row)
                if (!std::isfinite(e))
                    throw validation_error("energies must be finite");
        }
        data_dist.validate();
        if (data_dist.outcomes != x_states)
            throw validation_error("data distribution does not match X states");
        w_init.validate();
        if (w_init.outcomes != w_states)
            throw validation_error("w_init does not match W states");
        if (!(w_rate_scale_hz > 0.0))
            throw validation_error("rate scale must be > 0");
        if (!(temperature_K > 0.0))
            throw validation_error("temperature must be > 0 K");
    }

    // rate(w -> w2 | x) for w != w2.
    double rate(std::size_t w, std::size_t w2, std::size_t x) const {
        double dE = energy_J[w2][x] - energy_J[w][x];
        return w_rate_scale_hz *
               std::exp(-dE / (2.0 * k_boltzmann * temperature_K));
    }

    // Generator for fixed x, column convention: dp/dt = G p.
    Eigen::MatrixXd generator(std::size_t x) const {
        const auto nw = static_cast<Eigen::Index>(w_states.size());
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nw, nw);
        for (Eigen::Index w = 0; w < nw; ++w) {
            double out_rate = 0.0;
            for (Eigen::Index w2 = 0; w2 < nw; ++w2) {
                if (w2 == w) continue;
                double r = rate(static_cast<std::size_t>(w),
                                static_cast<std::size_t>(w2), x);
                G(w2, w) = r;
                out_rate += r;
            }
            G(w, w) = -out_rate;
        }
        return G;
    }

    // Local detailed balance: rate(w->w2)/rate(w2->w) = exp(-dE/kT). Holds by
    // construction; the check guards edits and non-finite energies.
    void check_detailed_balance(std::size_t x, double tol = 1e-9) const {
        const double kT = k_boltzmann * temperature_K;
        for (std::size_t w = 0; w < w_states.size(); ++w)
            for (std::size_t w2 = w + 1; w2 < w_states.size(); ++w2) {
                double fwd = rate(w, w2, x), bwd = rate(w2, w, x);
                if (!(fwd > 0.0) || !(bwd > 0.0))
                    throw validation_error("jump rates must be positive");
                double lhs = std::log(fwd / bwd);
                double rhs = -(energy_J[w2][x] - energy_J[w][x]) / kT;
                if (std::abs(lhs - rhs) >
                    tol * std::max({1.0, std::abs(lhs), std::abs(rhs)}))
                    throw validation_error(
                        "rates violate local detailed balance");
            }
    }

    FiniteDistribution gibbs_conditional(std::size_t x) const {
        const double kT = k_boltzmann * temperature_K;
        FiniteDistribution d;
        d.outcomes = w_states;
        d.probs.resize(w_states.size());
        double z = 0.0;
        for (std::size_t w = 0; w < w_states.size(); ++w) {
            d.probs[w] = std::exp(-energy_J[w][x] / kT);
            z += d.probs[w];
        }
        for (double& p : d.probs) p /= z;
        return d;
    }
};

struct EpisodeTrace {
    double duration_s = 0.0;
    JointTable joint_post;  // (W_pre, X, W_post)
    double Q_diss_J = 0.0;          // expected heat to the bath
    double dS_sys_J_per_K = 0.0;    // k_B ln2 (H(W_post) - H(W_pre))
    double info_flow_bits = 0.0;    // I(W_post; X | W_pre)
};

// Evolves p(w|x) exactly under the master equation for each data value, then
// assembles the episode joint. No external driving occurs, so the expected
// heat equals the drop in mean energy.
inline EpisodeTrace propagate_episode(const BipartiteProcess& proc,
                                      double duration_s) {
    proc.validate();
    if (!(duration_s >= 0.0))
        throw validation_error("duration must be >= 0 s");
    for (std::size_t x = 0; x < proc.x_states.size(); ++x)
        proc.check_detailed_balance(x);

    const std::size_t nw = proc.w_states.size(), nx = proc.x_states.size();
    EpisodeTrace trace;
    trace.duration_s = duration_s;
    trace.joint_post = JointTable::zeros(
        {"W_pre", "X", "W_post"},
        {proc.w_states, proc.x_states, proc.w_states});

    Eigen::VectorXd p0(static_cast<Eigen::Index>(nw));
    for (std::size_t w = 0; w < nw; ++w)
        p0(static_cast<Eigen::Index>(w)) = proc.w_init.probs[w];

    double heat = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        Eigen::MatrixXd P =
            (proc.generator(x) * duration_s).exp();
        // The exponential of a generator is column-stochastic; scrub the
        // 1e-16-scale negatives the Pade evaluation can leave behind.
        for (Eigen::Index c = 0; c < P.cols(); ++c) {
            double colsum = 0.0;
            for (Eigen::Index r = 0; r < P.rows(); ++r) {
                if (P(r, c) < 0.0) P(r, c) = 0.0;
                colsum += P(r, c);
            }
            P.col(c) /= colsum;
        }
        double e_pre = 0.0, e_post = 0.0;
        Eigen::VectorXd px = P * p0;
        for (std::size_t w = 0; w < nw; ++w) {
            e_pre += proc.w_init.probs[w] * proc.energy_J[w][x];
            e_post += px(static_cast<Eigen::Index>(w)) * proc.energy_J[w][x];
        }
        heat += proc.data_dist.probs[x] * (e_pre - e_post);
        for (std::size_t w = 0; w < nw; ++w) {
            double base = proc.w_init.probs[w] * proc.data_dist.probs[x];
            if (base == 0.0) continue;
            for (std::size_t w2 = 0; w2 < nw; ++w2)
                trace.joint_post.at({w, x, w2}) =
                    base * P(static_cast<Eigen::Index>(w2),
                             static_cast<Eigen::Index>(w));
        }
    }
    trace.Q_diss_J = heat;
    double h_post =
        entropy(trace.joint_post.marginal_distribution("W_post"));
    double h_pre = entropy(proc.w_init);
    trace.dS_sys_J_per_K = system_entropy_from_bits(h_post - h_pre);
    trace.info_flow_bits =
        conditional_mi(trace.joint_post, "W_post", "X", "W_pre");
    return trace;
}

struct LearningVerdict {
    BoundVerdict lemma;  // info flow vs total entropy production, in bits
    std::optional<BoundVerdict> closed_cycle;  // when dS_sys ~ 0
};

// Lemma check: I(W_post;X|W_pre) <= (dS_sys + Q_diss/T)/(k_B ln2). With a
// stationary-mixture start dS_sys vanishes and the bound collapses to the
// Landauer form info_flow <= Q_diss/(k_B T ln2).
inline LearningVerdict verify_learning_inequality(const EpisodeTrace& t,
                                                  double temperature_K) {
    if (!(temperature_K > 0.0))
        throw validation_error("temperature must be > 0 K");
    LearningVerdict v;
    auto sigma = entropy_production(t.dS_sys_J_per_K, t.Q_diss_J, temperature_K);
    v.lemma = make_verdict("lemma_learning_inequality", t.info_flow_bits,
                           sigma.bit_equivalent, "bits",
                           "episode information flow vs entropy production");
    if (std::abs(t.dS_sys_J_per_K) <= 1e-9 * k_boltzmann) {
        double rhs =
            t.Q_diss_J / landauer_joules_per_bit(temperature_K);
        v.closed_cycle =
            make_verdict("closed_cycle_landauer", t.info_flow_bits, rhs,
                         "bits", "stationary start: dS_sys ~ 0");
    }
    return v;
}

// -------------------------------------------------------------------------
// XOR register protocol: m_post = m_pre XOR z with m_pre = 0, an exactly
// reversible copy of Z into the register.
// -------------------------------------------------------------------------
enum class Boundary { open, closed };

struct RegisterProtocol {
    int n = 1;                    // register width in bits
    FiniteDistribution z_dist;    // over the 2^n words
    Boundary boundary = Boundary::open;
    double temperature_K = 300.0;

    void validate() const {
        if (n < 1 || n > 16)
            throw validation_error("register width must be in [1, 16]");
        z_dist.validate();
        if (z_dist.size() != (static_cast<std::size_t>(1) << n))
            throw validation_error("z distribution must cover all 2^n words");
        if (!(temperature_K > 0.0))
            throw validation_error("temperature must be > 0 K");
    }
};

struct RegisterResult {
    double delta_I_bits = 0.0;  // I(M_post;Z) - I(M_pre;Z)
    double Q_diss_J = 0.0;
    std::optional<double> eta_tilde_bits_per_J;
    bool eta_unbounded = false;
    std::string caveat;
};

namespace detail {

// I(M;Z) over the sparse deterministic pairing m = f(z), without building
// the dense 2^n x 2^n joint.
inline double sparse_map_mi(const std::vector<double>& pz,
                            const std::vector<std::uint32_t>& m_of_z) {
    std::unordered_map<std::uint32_t, double> pm;
    for (std::size_t z = 0; z < pz.size(); ++z)
        if (pz[z] > 0.0) pm[m_of_z[z]] += pz[z];
    double info = 0.0;
    for (std::size_t z = 0; z < pz.size(); ++z) {
        if (pz[z] <= 0.0) continue;
        // joint mass p(z, m_of_z) is pz[z] itself
        info += pz[z] * std::log2(pz[z] / (pz[z] * pm[m_of_z[z]]));
    }
    return std::max(info, 0.0);
}

}  // namespace detail

inline RegisterResult run_register_protocol(const RegisterProtocol& r) {
    r.validate();
    const std::size_t words = static_cast<std::size_t>(1) << r.n;
    std::vector<std::uint32_t> m_pre(words, 0u), m_post(words);
    for (std::size_t z = 0; z < words; ++z)
        m_post[z] = m_pre[z] ^ static_cast<std::uint32_t>(z);

    RegisterResult out;
    out.delta_I_bits = detail::sparse_map_mi(r.z_dist.probs, m_post) -
                       detail::sparse_map_mi(r.z_dist.probs, m_pre);
    if (r.boundary == Boundary::open) {
        out.Q_diss_J = 0.0;
        out.eta_unbounded = true;
        out.caveat =
            "open boundary: zero dissipation holds in the quasistatic limit "
            "(arbitrarily slow driving); finite-time operation dissipates";
    } else {
        out.Q_diss_J = static_cast<double>(r.n) *
                       landauer_joules_per_bit(r.temperature_K);
        out.eta_tilde_bits_per_J = out.delta_I_bits / out.Q_diss_J;
        out.caveat =
            "closed boundary: register reset charged at the full n k_B T ln2 "
            "even when the register marginal is non-uniform (conservative)";
    }
    return out;
}

}  // namespace joulebits

#endif  // JOULEBITS_THERMOSIM_HPP

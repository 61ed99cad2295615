#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "joulebits/epiplexity.hpp"
#include "joulebits/rng.hpp"
#include "oracles.hpp"

using namespace joulebits;

namespace {

GenerativeEnv random_env(SplitRng& rng, std::size_t nz, std::size_t nx) {
    GenerativeEnv env;
    for (std::size_t z = 0; z < nz; ++z)
        env.latent_alphabet.push_back("z" + std::to_string(z));
    env.prior.outcomes = env.latent_alphabet;
    env.prior.probs = rng.simplex(nz);
    for (std::size_t x = 0; x < nx; ++x)
        env.x_alphabet.push_back(std::to_string(x));
    for (std::size_t z = 0; z < nz; ++z) env.obs_model.push_back(rng.simplex(nx));
    return env;
}

LearnerSpec random_learner(SplitRng& rng, std::size_t nw, std::size_t nx) {
    LearnerSpec l;
    for (std::size_t w = 0; w < nw; ++w)
        l.state_alphabet.push_back(std::to_string(w));
    l.initial.outcomes = l.state_alphabet;
    l.initial.probs = rng.simplex(nw);
    l.update.resize(nw);
    for (std::size_t w = 0; w < nw; ++w)
        for (std::size_t x = 0; x < nx; ++x)
            l.update[w].push_back(rng.simplex(nw));
    l.episode_energy.E_cons_J = 1e-20;
    l.episode_energy.Q_diss_J = 1e-20;
    return l;
}

// dense copy of the episode joint as nested vectors [w_post][z][w_pre]
std::vector<std::vector<std::vector<double>>> post_z_pre(const EpisodeJoint& ep) {
    const auto& j = ep.joint;
    const std::size_t nz = j.axis_size(0), nw = j.axis_size(1),
                      nx = j.axis_size(2);
    std::vector<std::vector<std::vector<double>>> t(
        nw, std::vector<std::vector<double>>(nz, std::vector<double>(nw, 0.0)));
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t w = 0; w < nw; ++w)
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t w2 = 0; w2 < nw; ++w2)
                    t[w2][z][w] += j.at({z, w, x, w2});
    return t;
}

}  // namespace

TEST_CASE("episode joint is a normalized distribution") {
    SplitRng rng(101, 0);
    auto env = random_env(rng, 3, 2);
    auto learner = random_learner(rng, 2, 2);
    auto ep = build_episode_joint(env, learner);
    ep.joint.validate();
    CHECK(ep.joint.variable_names ==
          std::vector<std::string>{"Z", "W_pre", "X", "W_post"});

    // cells carry the declared factorization
    double got = ep.joint.at({1, 0, 1, 1});
    double want = env.prior.probs[1] * learner.initial.probs[0] *
                  env.obs_model[1][1] * learner.update[0][1][1];
    CHECK(got == Catch::Approx(want).margin(1e-15));
}

TEST_CASE("acquired epiplexity matches the direct conditional mi") {
    SplitRng rng(103, 0);
    for (int rep = 0; rep < 15; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        auto env = random_env(sub, 2 + sub.below(3), 2 + sub.below(2));
        auto learner =
            random_learner(sub, 2 + sub.below(3), env.x_alphabet.size());
        auto ep = build_episode_joint(env, learner);
        double got = acquired_epiplexity(ep);
        double want = oracle::cmi_3d(post_z_pre(ep));
        CHECK(got == Catch::Approx(want).margin(1e-12));
        CHECK(got >= 0.0);
    }
}

TEST_CASE("copy learner acquires exactly the data information") {
    // W_post deterministically records X, so Delta I = I(X;Z)
    GenerativeEnv env;
    env.latent_alphabet = {"fair", "biased"};
    env.prior = FiniteDistribution{{"fair", "biased"}, {0.5, 0.5}};
    env.x_alphabet = {"heads", "tails"};
    env.obs_model = {{0.5, 0.5}, {0.9, 0.1}};

    LearnerSpec l;
    l.state_alphabet = {"saw_heads", "saw_tails"};
    l.initial = FiniteDistribution{{"saw_heads", "saw_tails"}, {1.0, 0.0}};
    l.update = {{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}};
    l.episode_energy.E_cons_J = 1.0;

    auto ep = build_episode_joint(env, l);
    std::vector<std::vector<double>> zx(2, std::vector<double>(2));
    for (std::size_t z = 0; z < 2; ++z)
        for (std::size_t x = 0; x < 2; ++x)
            zx[z][x] = env.prior.probs[z] * env.obs_model[z][x];
    double direct = oracle::mi_2d(zx);
    CHECK(acquired_epiplexity(ep) == Catch::Approx(direct).margin(1e-12));
    CHECK(signed_epiplexity_change(ep) == Catch::Approx(direct).margin(1e-12));

    auto bound = dpi_bound(ep);
    CHECK(bound.delta_I_bits == Catch::Approx(bound.bound_bits).margin(1e-12));
}

TEST_CASE("oblivious learner acquires nothing") {
    SplitRng rng(107, 0);
    auto env = random_env(rng, 3, 3);
    LearnerSpec l;
    l.state_alphabet = {"0", "1"};
    l.initial = FiniteDistribution{{"0", "1"}, {0.5, 0.5}};
    // update ignores x entirely
    l.update = {{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}},
                {{0.8, 0.2}, {0.8, 0.2}, {0.8, 0.2}}};
    l.episode_energy.E_cons_J = 1.0;
    auto ep = build_episode_joint(env, l);
    CHECK(acquired_epiplexity(ep) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("dpi bound holds under fuzz and rejects interactive joints") {
    SplitRng rng(109, 0);
    for (int rep = 0; rep < 15; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        auto env = random_env(sub, 2 + sub.below(3), 2 + sub.below(3));
        auto learner =
            random_learner(sub, 2 + sub.below(3), env.x_alphabet.size());
        auto ep = build_episode_joint(env, learner);
        auto b = dpi_bound(ep);
        CHECK(b.delta_I_bits <= b.bound_bits + 1e-9);
    }

    auto env = random_env(rng, 2, 2);
    auto learner = random_learner(rng, 2, 2);
    auto ep = build_episode_joint(env, learner);
    // move mass between w_post values inside one (z,w,x) block only: the
    // update kernel reconstructed from the joint no longer fits every z
    double delta = 0.5 * std::min(ep.joint.cells[0], ep.joint.cells[1]);
    REQUIRE(delta > 1e-9);
    ep.joint.cells[0] += delta;
    ep.joint.cells[1] -= delta;
    double total = 0.0;
    for (double c : ep.joint.cells) total += c;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(dpi_bound(ep), convention_error);
}

TEST_CASE("quantized epiplexity never exceeds the exact value") {
    SplitRng rng(113, 0);
    for (int rep = 0; rep < 10; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        auto env = random_env(sub, 3, 3);
        auto learner = random_learner(sub, 4, 3);
        auto ep = build_episode_joint(env, learner);
        double exact = acquired_epiplexity(ep);

        Quantizer q;
        q.bin_width = sub.uniform(1.5, 3.0);
        q.origin = 0.0;
        q.num_bins = 2;
        double coarse = acquired_epiplexity(ep, {{"W_post", q}});
        CHECK(coarse <= exact + 1e-12);
    }
}

TEST_CASE("duplicate latents are reported") {
    GenerativeEnv env;
    env.latent_alphabet = {"z0", "z1", "z2"};
    env.prior = FiniteDistribution::uniform({"z0", "z1", "z2"});
    env.x_alphabet = {"0", "1"};
    env.obs_model = {{0.5, 0.5}, {0.2, 0.8}, {0.5, 0.5}};
    auto dups = env.duplicate_latents();
    REQUIRE(dups.size() == 1);
    CHECK(dups[0].first == "z0");
    CHECK(dups[0].second == "z2");
}

TEST_CASE("learning efficiency record") {
    EnergyLedger ledger;
    ledger.E_cons_J = 4e-21;
    ledger.Q_diss_J = 2e-21;
    ledger.dU_sys_J = 2e-21;
    ledger.temperature_K = 300.0;
    auto r = learning_efficiency(1.5, ledger);
    CHECK(r.eta_E_bits_per_J == Catch::Approx(1.5 / 4e-21));
    REQUIRE(r.eta_tilde_E_bits_per_J.has_value());
    CHECK(*r.eta_tilde_E_bits_per_J == Catch::Approx(1.5 / 2e-21));
    REQUIRE(r.landauer_fraction.has_value());
    // eta_tilde at exactly the Landauer rate gives fraction 1
    CHECK(*r.landauer_fraction ==
          Catch::Approx(1.5 / 2e-21 * landauer_joules_per_bit(300.0)));

    EnergyLedger lossless;
    lossless.E_cons_J = 1e-21;
    lossless.Q_diss_J = 0.0;
    lossless.dU_sys_J = 1e-21;
    auto r2 = learning_efficiency(1.0, lossless);
    CHECK_FALSE(r2.eta_tilde_E_bits_per_J.has_value());
    CHECK_FALSE(r2.landauer_fraction.has_value());

    EnergyLedger zero;
    CHECK_THROWS_AS(learning_efficiency(1.0, zero), validation_error);
}

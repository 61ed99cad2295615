// joulebits: bits-per-joule efficiency metrics on exactly solvable systems.
//
// Exit codes: 0 success, 2 validation/parse failure, 3 bound violation under
// --strict. Outputs are written atomically and embed the flag set used, so
// identical invocations produce byte-identical files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "joulebits/joulebits.hpp"

namespace jb = joulebits;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw jb::error("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw jb::error("cannot write file: " + tmp.string());
        f << content;
        if (!f) throw jb::error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw jb::validation_error("not a number: '" + item + "'");
        }
    }
    return out;
}

jb::ThroughputSection audit_throughput() {
    jb::ThroughputSection t;
    t.description =
        "not measured: deterministic exact audit with no physical runtime "
        "semantics";
    return t;
}

// Checks checklist completeness and, under --strict, verdict violations.
// Returns the process exit code.
int finish_report(jb::EfficiencyReport& report, const std::string& out_path,
                  bool strict, bool force, bool quiet_summary = false) {
    auto violations = jb::validate(report.checklist);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "checklist violation: " << v << "\n";
        if (!force) {
            std::cerr << "refusing to emit an unvalidated report (use --force "
                         "to downgrade to warnings)\n";
            return 2;
        }
    }
    if (!out_path.empty())
        atomic_write(out_path, jb::canonical_json(jb::to_json(report)));
    if (!quiet_summary) std::cout << jb::render_summary(report);
    if (strict)
        for (const auto& v : report.bound_verdicts)
            if (!v.satisfied) return 3;
    return 0;
}

// ---- empower --------------------------------------------------------------

struct EmpowerArgs {
    std::string mdp_path;
    std::string budgets;
    std::string convention = "total";
    std::string endpoint = "observation";
    double tol = 1e-9;
    double temperature_K = 300.0;
    int seed = 0;
    std::string out_curve;
    std::string out_report;
    bool strict = false;
    bool force = false;
};

int run_empower(const EmpowerArgs& a) {
    jb::MdpSpec mdp =
        jb::mdp_from_json(jb::parse_json(read_file(a.mdp_path), a.mdp_path));
    jb::Endpoint ep = a.endpoint == "state" ? jb::Endpoint::state
                                            : jb::Endpoint::observation;
    jb::CostedChannel cch = jb::unroll_mdp(mdp, ep);
    cch.convention = jb::convention_from_string(a.convention);

    auto costs = jb::effective_costs(cch, cch.convention);
    std::vector<double> budgets;
    if (!a.budgets.empty()) {
        budgets = parse_csv_doubles(a.budgets);
    } else {
        budgets.push_back(*std::max_element(costs.begin(), costs.end()));
    }
    jb::EmpowermentCurve curve = jb::empowerment_curve(cch, budgets, a.tol);

    std::optional<jb::CapacityPerCost> cpu;
    try {
        cpu = jb::capacity_per_unit_cost(cch, cch.convention, a.tol);
        for (const auto& w : cpu->warnings) std::cerr << "warning: " << w << "\n";
    } catch (const jb::degeneracy_error& e) {
        std::cerr << "warning: " << e.what() << "\n";
    }

    jb::EfficiencyReport report;
    report.invocation = std::map<std::string, std::string>{
        {"subcommand", "empower"},
        {"mdp", a.mdp_path},
        {"budgets", a.budgets},
        {"convention", a.convention},
        {"endpoint", a.endpoint},
        {"tol", jb::format_double(a.tol)},
        {"T", jb::format_double(a.temperature_K)},
        {"seed", std::to_string(a.seed)},
        {"strict", a.strict ? "true" : "false"},
        {"force", a.force ? "true" : "false"},
    };

    auto& c = report.checklist;
    c.accounting_boundary =
        "declared per-action energies from MDP spec '" + a.mdp_path +
        "'; horizon baseline " + jb::format_double(cch.baseline_energy_J) +
        " J; nothing outside the action channel is charged";
    jb::BalanceSection bal;
    bal.ledger.E_cons_J = budgets.back();
    bal.ledger.Q_diss_J = budgets.back();
    bal.ledger.temperature_K = a.temperature_K;
    auto chk = jb::balance_residual(bal.ledger);
    bal.balanced = chk.balanced;
    bal.approx_justified = chk.approx_justified;
    c.energy_balance_terms = bal;
    c.baseline_policy = jb::BaselineSection{
        mdp.null_action.value_or("none"), cch.baseline_energy_J,
        cch.convention};
    c.coarse_graining = std::vector<jb::CoarseGrainEntry>{
        {a.endpoint == "state" ? "S_tau" : "O_tau",
         "exact finite alphabet, no quantization applied", {}}};
    c.horizon_sampling = jb::HorizonSection{
        mdp.horizon,
        "open-loop action sequences propagated exactly from initial state '" +
            mdp.initial_state + "'",
        "state reset to the initial state before every sequence"};
    c.time_throughput = audit_throughput();
    c.estimator_details = jb::EstimatorSection{
        "not evaluated",
        "Blahut-Arimoto with multiplier bisection, capacity gap <= " +
            jb::format_double(a.tol) + " bits; per-unit-cost via Dinkelbach "
            "ratio iteration",
        "not evaluated"};

    jb::EmpowermentSection sec;
    sec.curve = curve;
    sec.endpoint = a.endpoint;
    if (cpu) {
        sec.capacity_per_unit_cost_bits_per_J = cpu->bits_per_joule;
        sec.unbounded = cpu->unbounded;
    }
    report.eta_C = sec;
    report.bound_verdicts.push_back(jb::make_verdict(
        "empowerment_curve_concavity", curve.concavity_violation(), 1e-6,
        "bits", "midpoint concavity defect of the reported curve"));
    report.bound_verdicts.push_back(jb::make_verdict(
        "empowerment_curve_monotonicity", curve.nondecreasing(1e-6) ? 0.0 : 1.0,
        0.5, "indicator", "0 when capacities are nondecreasing in budget"));

    if (!a.out_curve.empty()) atomic_write(a.out_curve, jb::curve_csv(curve));
    return finish_report(report, a.out_report, a.strict, a.force);
}

// ---- epiplexity -----------------------------------------------------------

struct EpiplexityArgs {
    std::string env_path;
    std::vector<std::string> quantize;  // VAR:width:origin:bins
    double dS_sys_J_per_K = 0.0;
    int seed = 0;
    std::string out_report;
    bool strict = false;
    bool force = false;
};

int run_epiplexity(const EpiplexityArgs& a) {
    jb::EnvironmentFile file = jb::environment_from_json(
        jb::parse_json(read_file(a.env_path), a.env_path));
    for (const auto& [z1, z2] : file.env.duplicate_latents())
        std::cerr << "warning: latents '" << z1 << "' and '" << z2
                  << "' induce identical data models; Z may not be minimal\n";

    jb::EpisodeJoint ep = jb::build_episode_joint(file.env, file.learner);
    auto dpi = jb::dpi_bound(ep);

    std::vector<std::pair<std::string, jb::Quantizer>> quantizers;
    std::vector<jb::CoarseGrainEntry> grains;
    for (const auto& spec : a.quantize) {
        std::stringstream ss(spec);
        std::string var, width, origin, bins;
        if (!std::getline(ss, var, ':') || !std::getline(ss, width, ':') ||
            !std::getline(ss, origin, ':') || !std::getline(ss, bins, ':'))
            throw jb::validation_error(
                "quantizer spec must be VAR:width:origin:bins, got '" + spec +
                "'");
        jb::Quantizer q;
        q.bin_width = std::stod(width);
        q.origin = std::stod(origin);
        q.num_bins = static_cast<std::size_t>(std::stoul(bins));
        q.validate();
        quantizers.emplace_back(var, q);
        grains.push_back({var,
                          "fixed left-closed bins of width " +
                              jb::format_double(q.bin_width) + " from " +
                              jb::format_double(q.origin),
                          q.bin_width});
    }
    double delta_I = jb::acquired_epiplexity(ep, quantizers);
    double signed_change = jb::signed_epiplexity_change(ep);
    const auto& ledger = file.learner.episode_energy;
    jb::EfficiencyRecord record = jb::learning_efficiency(delta_I, ledger);
    auto corollary = jb::corollary_check(delta_I, a.dS_sys_J_per_K,
                                         ledger.Q_diss_J, ledger.temperature_K);

    jb::EfficiencyReport report;
    std::string quantize_echo;
    for (const auto& q : a.quantize)
        quantize_echo += (quantize_echo.empty() ? "" : ";") + q;
    report.invocation = std::map<std::string, std::string>{
        {"subcommand", "epiplexity"},
        {"env", a.env_path},
        {"quantize", quantize_echo},
        {"dS_sys", jb::format_double(a.dS_sys_J_per_K)},
        {"seed", std::to_string(a.seed)},
        {"strict", a.strict ? "true" : "false"},
        {"force", a.force ? "true" : "false"},
    };

    auto& c = report.checklist;
    c.accounting_boundary =
        "learner W inside the boundary; data source X and latent Z outside; "
        "episode energy declared by the ledger in '" + a.env_path + "'";
    jb::BalanceSection bal;
    bal.ledger = ledger;
    auto chk = jb::balance_residual(ledger);
    bal.balanced = chk.balanced;
    bal.approx_justified = chk.approx_justified;
    c.energy_balance_terms = bal;
    c.baseline_policy = jb::BaselineSection{"none (passive batch episode)", 0.0,
                                            jb::CostConvention::total};
    if (grains.empty())
        grains.push_back(
            {"Z,W,X", "exact finite alphabets, no quantization applied", {}});
    c.coarse_graining = grains;
    c.horizon_sampling = jb::HorizonSection{
        1,
        "single passive episode: draw z ~ prior, x ~ p(x|z), update "
        "w_pre -> w_post",
        "w_pre redrawn from the declared initial distribution each episode"};
    c.time_throughput = audit_throughput();
    c.estimator_details = jb::EstimatorSection{
        "exact conditional mutual information I(W_post;Z|W_pre) on the "
        "enumerated episode joint",
        "not evaluated", "not evaluated"};

    report.eta_E = record;
    report.bound_verdicts.push_back(jb::make_verdict(
        "dpi_bound", dpi.delta_I_bits, dpi.bound_bits, "bits",
        "acquired epiplexity vs data information I(X;Z|W_pre)"));
    report.bound_verdicts.push_back(corollary.verdict);

    std::cout << "delta_I = " << jb::format_double(delta_I) << " bits\n";
    std::cout << "signed change I(W_post;Z) - I(W_pre;Z) = "
              << jb::format_double(signed_change) << " bits\n";
    return finish_report(report, a.out_report, a.strict, a.force);
}

// ---- mdl ------------------------------------------------------------------

struct MdlArgs {
    std::string tokens_path;
    bool tokens_json = false;
    std::string alphabet;
    int max_order = 2;
    double param_resolution_bits = -1.0;  // <0 means unset
    double ell0 = -1.0;                   // <0 means log2 |alphabet|
    double energy_J = -1.0;               // <0 means not declared
    int seed = 0;
    std::string out_report;
    bool strict = false;
    bool force = false;
};

int run_mdl(const MdlArgs& a) {
    jb::TokenStream stream;
    if (a.tokens_json) {
        jb::json j = jb::parse_json(read_file(a.tokens_path), a.tokens_path);
        jb::check_fields(j, "token file", {"alphabet", "tokens"});
        stream = jb::TokenStream::from_symbols(
            jb::detail::string_array(j.at("alphabet"), "alphabet"),
            jb::detail::string_array(j.at("tokens"), "tokens"));
    } else {
        std::string text = read_file(a.tokens_path);
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
            text.pop_back();
        stream = jb::TokenStream::from_text(
            text, a.alphabet.empty() ? std::nullopt
                                     : std::optional<std::string>(a.alphabet));
    }
    jb::ModelBudget budget;
    budget.max_order = a.max_order;
    if (a.param_resolution_bits >= 0.0)
        budget.param_resolution_bits = a.param_resolution_bits;
    budget.notes = "k-th order Markov models, k <= " +
                   std::to_string(a.max_order);
    jb::MdlReport mdl = jb::two_part_mdl(stream, budget);
    double n_tokens = static_cast<double>(stream.size());
    double ell = mdl.total_bits / n_tokens;
    double ell0 = a.ell0 >= 0.0
                      ? a.ell0
                      : std::log2(static_cast<double>(stream.alphabet.size()));
    double gain = jb::compression_gain(ell0, ell, stream.size());

    jb::EfficiencyReport report;
    report.invocation = std::map<std::string, std::string>{
        {"subcommand", "mdl"},
        {"tokens", a.tokens_path},
        {"json", a.tokens_json ? "true" : "false"},
        {"alphabet", a.alphabet},
        {"max_order", std::to_string(a.max_order)},
        {"param_resolution_bits",
         a.param_resolution_bits >= 0.0
             ? jb::format_double(a.param_resolution_bits)
             : "default"},
        {"ell0", jb::format_double(ell0)},
        {"energy", a.energy_J > 0.0 ? jb::format_double(a.energy_J)
                                    : "not declared"},
        {"seed", std::to_string(a.seed)},
        {"strict", a.strict ? "true" : "false"},
        {"force", a.force ? "true" : "false"},
    };

    auto& c = report.checklist;
    c.accounting_boundary =
        "operational proxy on token stream '" + a.tokens_path +
        "'; training energy is declared, not measured";
    jb::BalanceSection bal;
    bal.ledger.E_cons_J = a.energy_J > 0.0 ? a.energy_J : 0.0;
    bal.ledger.Q_diss_J = bal.ledger.E_cons_J;
    auto chk = jb::balance_residual(bal.ledger);
    bal.balanced = chk.balanced;
    bal.approx_justified = chk.approx_justified;
    c.energy_balance_terms = bal;
    c.baseline_policy = jb::BaselineSection{
        "uniform code at " + jb::format_double(ell0) + " bits/token", 0.0,
        jb::CostConvention::total};
    c.coarse_graining = std::vector<jb::CoarseGrainEntry>{
        {"X", "token alphabet of size " +
                  std::to_string(stream.alphabet.size()) +
                  ", one symbol per token", {}}};
    c.horizon_sampling = jb::HorizonSection{
        1, "single pass over the fixed evaluation stream of " +
               std::to_string(stream.size()) + " tokens",
        "stateless: counts reset per run"};
    c.time_throughput = audit_throughput();
    c.estimator_details = jb::EstimatorSection{
        "not evaluated", "not evaluated",
        "two-part MDL over Markov orders 0.." + std::to_string(a.max_order) +
            "; L(M) = (params/2) log2 N + uniform order code; KT "
            "(add-one-half) prequential available per order"};

    jb::MdlSection sec;
    sec.report = mdl;
    sec.compression_gain_bits = gain;
    if (a.energy_J > 0.0)
        sec.eta_E_mdl_bits_per_J = jb::eta_e_mdl(gain, a.energy_J);
    report.mdl_companion = sec;

    std::cout << "chosen order = " << mdl.chosen_order << "\n";
    std::cout << "MDL total = " << jb::format_double(mdl.total_bits)
              << " bits (L_M " << jb::format_double(mdl.L_M_bits) << ", L_X|M "
              << jb::format_double(mdl.L_X_given_M_bits) << ")\n";
    std::cout << "compression gain vs baseline = " << jb::format_double(gain)
              << " bits\n";
    return finish_report(report, a.out_report, a.strict, a.force);
}

// ---- thermo-check ---------------------------------------------------------

struct ThermoArgs {
    std::string ledger_path;
    double delta_I_bits = 0.0;
    double dS_sys_J_per_K = 0.0;
    double negligibility = 0.01;
    double dI_agent_bits = 0.0;
    double dI_env_bits = 0.0;
    bool with_budget = false;
    int seed = 0;
    std::string out_report;
    bool strict = false;
    bool force = false;
};

int run_thermo(const ThermoArgs& a) {
    jb::EnergyLedger ledger = jb::ledger_from_json(
        jb::parse_json(read_file(a.ledger_path), a.ledger_path));
    auto chk = jb::balance_residual(ledger, a.negligibility);
    auto corollary = jb::corollary_check(a.delta_I_bits, a.dS_sys_J_per_K,
                                         ledger.Q_diss_J, ledger.temperature_K);
    auto sigma = jb::entropy_production(a.dS_sys_J_per_K, ledger.Q_diss_J,
                                        ledger.temperature_K);
    auto scale = jb::landauer_scale(ledger.temperature_K);

    std::cout << "balance residual = " << jb::format_double(chk.residual_J)
              << " J (" << (chk.balanced ? "balanced" : "INCONSISTENT")
              << ")\n";
    std::cout << "E_cons ~ Q_diss approximation "
              << (chk.approx_justified ? "justified" : "NOT justified")
              << " at negligibility " << jb::format_double(a.negligibility)
              << "\n";
    std::cout << "entropy production = " << jb::format_double(sigma.sigma_J_per_K)
              << " J/K (" << jb::format_double(sigma.bit_equivalent)
              << " bit-equivalents)\n";
    std::cout << "landauer scale at " << jb::format_double(ledger.temperature_K)
              << " K = " << jb::format_double(scale.bits_per_joule)
              << " bits/J\n";

    jb::EfficiencyReport report;
    report.invocation = std::map<std::string, std::string>{
        {"subcommand", "thermo-check"},
        {"ledger", a.ledger_path},
        {"delta_I", jb::format_double(a.delta_I_bits)},
        {"dS_sys", jb::format_double(a.dS_sys_J_per_K)},
        {"negligibility", jb::format_double(a.negligibility)},
        {"seed", std::to_string(a.seed)},
        {"strict", a.strict ? "true" : "false"},
        {"force", a.force ? "true" : "false"},
    };
    auto& c = report.checklist;
    c.accounting_boundary =
        "ledger audit of '" + a.ledger_path +
        "': all terms declared by the experimenter, nothing measured here";
    jb::BalanceSection bal;
    bal.ledger = ledger;
    bal.negligibility_fraction = a.negligibility;
    bal.balanced = chk.balanced;
    bal.approx_justified = chk.approx_justified;
    c.energy_balance_terms = bal;
    c.baseline_policy = jb::BaselineSection{"none (ledger audit)", 0.0,
                                            jb::CostConvention::total};
    c.coarse_graining = std::vector<jb::CoarseGrainEntry>{
        {"none", "no state variables in a ledger audit", {}}};
    c.horizon_sampling = jb::HorizonSection{
        1, "one declared episode summarized by the ledger",
        "not applicable: stateless audit"};
    c.time_throughput = audit_throughput();
    c.estimator_details = jb::EstimatorSection{
        "declared delta_I, not estimated", "not evaluated", "not evaluated"};

    if (ledger.E_cons_J > 0.0)
        report.eta_E = jb::learning_efficiency(a.delta_I_bits, ledger);
    report.bound_verdicts.push_back(jb::make_verdict(
        "energy_balance", std::abs(chk.residual_J),
        1e-9 * std::max(std::abs(ledger.E_cons_J), 1e-300), "J",
        "ledger must satisfy E_cons = Q_diss + dU_sys + W_out + dE_store"));
    report.bound_verdicts.push_back(corollary.verdict);
    if (a.with_budget)
        report.bound_verdicts.push_back(jb::closed_cycle_budget(
            a.dI_agent_bits, a.dI_env_bits, sigma.sigma_J_per_K));
    return finish_report(report, a.out_report, a.strict, a.force);
}

// ---- decouple-demo --------------------------------------------------------

struct DecoupleArgs {
    int n = 3;
    std::string boundary = "open";
    double temperature_K = 300.0;
    std::string z_path;  // optional distribution file
    int seed = 0;
    std::string out_report;
    bool strict = false;
    bool force = false;
};

int run_decouple(const DecoupleArgs& a) {
    jb::RegisterProtocol proto;
    proto.n = a.n;
    proto.boundary =
        a.boundary == "closed" ? jb::Boundary::closed : jb::Boundary::open;
    proto.temperature_K = a.temperature_K;
    const std::size_t words = static_cast<std::size_t>(1) << a.n;
    std::vector<std::string> labels;
    for (std::size_t w = 0; w < words; ++w) labels.push_back(std::to_string(w));
    if (a.z_path.empty()) {
        proto.z_dist = jb::FiniteDistribution::uniform(labels);
    } else {
        jb::json j = jb::parse_json(read_file(a.z_path), a.z_path);
        jb::check_fields(j, "z distribution", {"probs"});
        proto.z_dist.outcomes = labels;
        for (const auto& p : j.at("probs"))
            proto.z_dist.probs.push_back(p.get<double>());
        proto.z_dist.validate();
    }
    jb::RegisterResult res = jb::run_register_protocol(proto);

    std::cout << "delta_I = " << jb::format_double(res.delta_I_bits)
              << " bits\n";
    std::cout << "Q_diss = " << jb::format_double(res.Q_diss_J) << " J\n";
    if (res.eta_unbounded)
        std::cout << "eta_tilde = unbounded (" << res.caveat << ")\n";
    else
        std::cout << "eta_tilde = "
                  << jb::format_double(*res.eta_tilde_bits_per_J)
                  << " bits/J\n";

    // The register's own entropy rise pays for the copy when the boundary is
    // open; a closed cycle must erase it at Landauer cost.
    double dS_sys = proto.boundary == jb::Boundary::open
                        ? jb::system_entropy_from_bits(res.delta_I_bits)
                        : 0.0;
    auto corollary = jb::corollary_check(res.delta_I_bits, dS_sys, res.Q_diss_J,
                                         a.temperature_K);

    jb::EfficiencyReport report;
    report.invocation = std::map<std::string, std::string>{
        {"subcommand", "decouple-demo"},
        {"n", std::to_string(a.n)},
        {"boundary", a.boundary},
        {"T", jb::format_double(a.temperature_K)},
        {"z", a.z_path},
        {"seed", std::to_string(a.seed)},
        {"strict", a.strict ? "true" : "false"},
        {"force", a.force ? "true" : "false"},
    };
    auto& c = report.checklist;
    c.accounting_boundary =
        a.boundary == "closed"
            ? "closed cycle: register reset to the all-zeros word is inside "
              "the boundary and charged"
            : "open boundary: the copied register leaves the cycle uncharged; "
              "see caveat";
    jb::BalanceSection bal;
    bal.ledger.E_cons_J = res.Q_diss_J;
    bal.ledger.Q_diss_J = res.Q_diss_J;
    bal.ledger.temperature_K = a.temperature_K;
    auto chk = jb::balance_residual(bal.ledger);
    bal.balanced = chk.balanced;
    bal.approx_justified = chk.approx_justified;
    c.energy_balance_terms = bal;
    c.baseline_policy = jb::BaselineSection{
        "identity map on the register (z = all-zeros word)", 0.0,
        jb::CostConvention::total};
    c.coarse_graining = std::vector<jb::CoarseGrainEntry>{
        {"M,Z", "exact binary words, no quantization", {}}};
    c.horizon_sampling = jb::HorizonSection{
        1, "one reversible update m -> m XOR z on an n=" + std::to_string(a.n) +
               " bit register",
        a.boundary == "closed"
            ? "register erased to all-zeros at n k_B T ln2 per cycle"
            : "no reset: register handed downstream (open boundary)"};
    c.time_throughput = audit_throughput();
    c.estimator_details = jb::EstimatorSection{
        "exact sparse mutual information over the XOR pairing",
        "not evaluated", "not evaluated"};

    if (res.Q_diss_J > 0.0) {
        jb::EnergyLedger ledger;
        ledger.E_cons_J = res.Q_diss_J;
        ledger.Q_diss_J = res.Q_diss_J;
        ledger.temperature_K = a.temperature_K;
        report.eta_E = jb::learning_efficiency(res.delta_I_bits, ledger);
    }
    report.bound_verdicts.push_back(corollary.verdict);
    return finish_report(report, a.out_report, a.strict, a.force);
}

// ---- scaling ---------------------------------------------------------------

struct ScalingArgs {
    std::string points_path;
    double kappa = 0.0;
    double eval_C = -1.0;
    std::size_t n_tokens = 1;
    int seed = 0;
    std::string out_path;
};

int run_scaling(const ScalingArgs& a) {
    std::vector<std::pair<double, double>> points;
    std::stringstream ss(read_file(a.points_path));
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw jb::format_error(a.points_path +
                                   ": expected lines of the form C,ell");
        try {
            points.emplace_back(std::stod(line.substr(0, comma)),
                                std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            if (points.empty()) continue;  // header line
            throw jb::format_error(a.points_path + ": bad number in '" + line +
                                   "'");
        }
    }
    auto fit = jb::fit_scaling(points, a.kappa);
    if (fit.warning) std::cerr << "warning: " << *fit.warning << "\n";

    std::cout << "ell_inf = " << jb::format_double(fit.fit.ell_inf)
              << " bits/token\n";
    std::cout << "a = " << jb::format_double(fit.fit.a) << ", alpha = "
              << jb::format_double(fit.fit.alpha) << "\n";
    std::cout << "residual rms = "
              << jb::format_double(fit.residual_rms_bits_per_token)
              << " bits/token\n";

    jb::json out;
    jb::json inv = jb::json::object();
    inv["subcommand"] = "scaling";
    inv["points"] = a.points_path;
    inv["kappa"] = jb::format_double(a.kappa);
    inv["C"] = a.eval_C > 0.0 ? jb::format_double(a.eval_C) : "not evaluated";
    inv["N"] = std::to_string(a.n_tokens);
    inv["seed"] = std::to_string(a.seed);
    out["invocation"] = inv;
    jb::json fj;
    fj["ell_inf_bits_per_token"] = fit.fit.ell_inf;
    fj["a"] = fit.fit.a;
    fj["alpha"] = fit.fit.alpha;
    fj["kappa_J_per_compute_unit"] = fit.fit.kappa;
    out["fit"] = fj;
    out["residual_rms_bits_per_token"] = fit.residual_rms_bits_per_token;
    if (fit.warning) out["warning"] = *fit.warning;
    if (a.eval_C > 0.0) {
        jb::json m;
        m["C"] = a.eval_C;
        m["N_tokens"] = static_cast<std::int64_t>(a.n_tokens);
        m["marginal_bits_per_J"] =
            jb::marginal_bits_per_joule(fit.fit, a.eval_C, a.n_tokens);
        out["marginal"] = m;
        std::cout << "marginal bits per joule at C = "
                  << jb::format_double(a.eval_C) << ": "
                  << jb::format_double(m["marginal_bits_per_J"].get<double>())
                  << "\n";
    }
    if (!a.out_path.empty()) atomic_write(a.out_path, jb::canonical_json(out));
    return 0;
}

// ---- report-validate --------------------------------------------------------

struct ValidateArgs {
    std::string report_path;
    bool render = false;
    bool force = false;
};

int run_validate(const ValidateArgs& a) {
    jb::EfficiencyReport report = jb::report_from_json(
        jb::parse_json(read_file(a.report_path), a.report_path));
    auto violations = jb::validate(report.checklist);
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    if (violations.empty()) std::cout << "checklist complete (7/7 sections)\n";
    if (a.render) std::cout << jb::render_summary(report);
    if (!violations.empty() && !a.force) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "bits-per-joule efficiency metrics on exactly solvable systems"};
    app.require_subcommand(1);

    EmpowerArgs emp;
    auto* empower = app.add_subcommand(
        "empower", "empowerment curve and capacity per unit cost of an MDP");
    empower->add_option("--mdp", emp.mdp_path, "MDP spec JSON")->required();
    empower->add_option("--budgets", emp.budgets,
                        "comma-separated energy budgets in J");
    empower->add_option("--convention", emp.convention, "total|incremental")
        ->check(CLI::IsMember({"total", "incremental"}));
    empower->add_option("--endpoint", emp.endpoint, "observation|state")
        ->check(CLI::IsMember({"observation", "state"}));
    empower->add_option("--tol", emp.tol, "capacity tolerance in bits");
    empower->add_option("--T", emp.temperature_K, "temperature in K");
    empower->add_option("--seed", emp.seed, "root seed");
    empower->add_option("--out-curve", emp.out_curve, "curve CSV path");
    empower->add_option("--out-report", emp.out_report, "report JSON path");
    empower->add_flag("--strict", emp.strict, "exit 3 on bound violation");
    empower->add_flag("--force", emp.force, "emit despite checklist violations");

    EpiplexityArgs epi;
    auto* epiplexity = app.add_subcommand(
        "epiplexity", "acquired epiplexity and learning efficiency");
    epiplexity->add_option("--env", epi.env_path, "environment+learner JSON")
        ->required();
    epiplexity->add_option("--quantize", epi.quantize,
                           "VAR:width:origin:bins (repeatable)");
    epiplexity->add_option("--dS-sys", epi.dS_sys_J_per_K,
                           "declared system entropy change in J/K");
    epiplexity->add_option("--seed", epi.seed, "root seed");
    epiplexity->add_option("--out-report", epi.out_report, "report JSON path");
    epiplexity->add_flag("--strict", epi.strict, "exit 3 on bound violation");
    epiplexity->add_flag("--force", epi.force,
                         "emit despite checklist violations");

    MdlArgs mdl;
    auto* mdlcmd = app.add_subcommand(
        "mdl", "two-part MDL and compression-gain proxy on a token stream");
    mdlcmd->add_option("--tokens", mdl.tokens_path, "token stream file")
        ->required();
    mdlcmd->add_flag("--json", mdl.tokens_json,
                     "treat the token file as JSON {alphabet, tokens}");
    mdlcmd->add_option("--alphabet", mdl.alphabet,
                       "byte alphabet (default: bytes present)");
    mdlcmd->add_option("--max-order", mdl.max_order, "Markov order cap");
    mdlcmd->add_option("--param-resolution-bits", mdl.param_resolution_bits,
                       "per-parameter description bits");
    mdlcmd->add_option("--ell0", mdl.ell0,
                       "baseline bits/token (default log2 |alphabet|)");
    mdlcmd->add_option("--energy", mdl.energy_J, "declared E_train in J");
    mdlcmd->add_option("--seed", mdl.seed, "root seed");
    mdlcmd->add_option("--out-report", mdl.out_report, "report JSON path");
    mdlcmd->add_flag("--strict", mdl.strict, "exit 3 on bound violation");
    mdlcmd->add_flag("--force", mdl.force, "emit despite checklist violations");

    ThermoArgs thermo;
    auto* thermocmd = app.add_subcommand(
        "thermo-check", "audit an energy ledger against the Landauer bounds");
    thermocmd->add_option("--ledger", thermo.ledger_path, "ledger JSON")
        ->required();
    thermocmd->add_option("--delta-I", thermo.delta_I_bits,
                          "declared information gain in bits");
    thermocmd->add_option("--dS-sys", thermo.dS_sys_J_per_K,
                          "declared system entropy change in J/K");
    thermocmd->add_option("--negligibility", thermo.negligibility,
                          "fraction of E_cons below which terms are negligible");
    thermocmd->add_option("--dI-agent", thermo.dI_agent_bits,
                          "agent-side information change in bits");
    thermocmd->add_option("--dI-env", thermo.dI_env_bits,
                          "environment-side information change in bits");
    thermocmd->add_flag("--budget", thermo.with_budget,
                        "also check the closed-cycle information budget");
    thermocmd->add_option("--seed", thermo.seed, "root seed");
    thermocmd->add_option("--out-report", thermo.out_report,
                          "report JSON path");
    thermocmd->add_flag("--strict", thermo.strict, "exit 3 on bound violation");
    thermocmd->add_flag("--force", thermo.force,
                        "emit despite checklist violations");

    DecoupleArgs dec;
    auto* decouple = app.add_subcommand(
        "decouple-demo", "XOR register protocol, open vs closed boundary");
    decouple->add_option("--n", dec.n, "register width in bits");
    decouple->add_option("--boundary", dec.boundary, "open|closed")
        ->check(CLI::IsMember({"open", "closed"}));
    decouple->add_option("--T", dec.temperature_K, "temperature in K");
    decouple->add_option("--z", dec.z_path,
                         "JSON {probs: [...]} over the 2^n words");
    decouple->add_option("--seed", dec.seed, "root seed");
    decouple->add_option("--out-report", dec.out_report, "report JSON path");
    decouple->add_flag("--strict", dec.strict, "exit 3 on bound violation");
    decouple->add_flag("--force", dec.force,
                       "emit despite checklist violations");

    ScalingArgs sc;
    auto* scaling = app.add_subcommand(
        "scaling", "power-law loss fit and marginal bits per joule");
    scaling->add_option("--points", sc.points_path, "CSV of C,ell_bits_per_token")
        ->required();
    scaling->add_option("--kappa", sc.kappa, "declared J per compute unit")
        ->required();
    scaling->add_option("--C", sc.eval_C, "compute at which to evaluate");
    scaling->add_option("--N", sc.n_tokens, "evaluation token count");
    scaling->add_option("--seed", sc.seed, "root seed");
    scaling->add_option("--out", sc.out_path, "output JSON path");

    ValidateArgs val;
    auto* validate = app.add_subcommand(
        "report-validate", "validate a report against the seven-point checklist");
    validate->add_option("report", val.report_path, "report JSON")->required();
    validate->add_flag("--render", val.render, "print the plain-text summary");
    validate->add_flag("--force", val.force, "violations become warnings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(empower)) return run_empower(emp);
        if (app.got_subcommand(epiplexity)) return run_epiplexity(epi);
        if (app.got_subcommand(mdlcmd)) return run_mdl(mdl);
        if (app.got_subcommand(thermocmd)) return run_thermo(thermo);
        if (app.got_subcommand(decouple)) return run_decouple(dec);
        if (app.got_subcommand(scaling)) return run_scaling(sc);
        if (app.got_subcommand(validate)) return run_validate(val);
    } catch (const jb::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

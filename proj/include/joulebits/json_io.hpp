#ifndef JOULEBITS_JSON_IO_HPP
#define JOULEBITS_JSON_IO_HPP

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "joulebits/channel.hpp"
#include "joulebits/epiplexity.hpp"
#include "joulebits/errors.hpp"
#include "joulebits/prob.hpp"
#include "joulebits/thermo.hpp"
#include "joulebits/thermosim.hpp"

namespace joulebits {

using json = nlohmann::json;

// -------------------------------------------------------------------------
// Canonical serialization: sorted keys, two-space indent, floats at 17
// significant digits. Two structurally equal values produce identical bytes.
// -------------------------------------------------------------------------
inline std::string format_double(double v) {
    if (!std::isfinite(v))
        throw format_error("non-finite number cannot be serialized");
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

inline void canonical_append(std::string& out, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string pad2(static_cast<std::size_t>(indent) + 2, ' ');
    switch (j.type()) {
        case json::value_t::null:
            out += "null";
            break;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            break;
        case json::value_t::number_integer:
            out += std::to_string(j.get<std::int64_t>());
            break;
        case json::value_t::number_unsigned:
            out += std::to_string(j.get<std::uint64_t>());
            break;
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        case json::value_t::string:
            append_escaped(out, j.get<std::string>());
            break;
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad2;
                canonical_append(out, j[i], indent + 2);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        }
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            std::vector<std::string> keys;
            keys.reserve(j.size());
            for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
            std::sort(keys.begin(), keys.end());
            out += "{\n";
            for (std::size_t i = 0; i < keys.size(); ++i) {
                out += pad2;
                append_escaped(out, keys[i]);
                out += ": ";
                canonical_append(out, j.at(keys[i]), indent + 2);
                if (i + 1 < keys.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
        }
        default:
            throw format_error("unsupported JSON value type");
    }
}

}  // namespace detail

inline std::string canonical_json(const json& j) {
    std::string out;
    detail::canonical_append(out, j, 0);
    out += '\n';
    return out;
}

inline json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw format_error(where + ": " + e.what());
    }
}

// Rejects unknown fields by name and checks required ones are present.
inline void check_fields(const json& j, const std::string& where,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw format_error(where + ": expected a JSON object");
    std::string unknown;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* f : required) known = known || it.key() == f;
        for (const char* f : optional) known = known || it.key() == f;
        if (!known) unknown += (unknown.empty() ? "" : ", ") + it.key();
    }
    if (!unknown.empty())
        throw format_error(where + ": unknown field(s): " + unknown);
    for (const char* f : required)
        if (!j.contains(f))
            throw format_error(where + ": missing required field '" +
                               std::string(f) + "'");
}

namespace detail {

inline double as_double(const json& j, const std::string& where) {
    if (!j.is_number())
        throw format_error(where + ": expected a number");
    return j.get<double>();
}

inline std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw format_error(where + ": expected a string");
    return j.get<std::string>();
}

inline std::vector<std::string> string_array(const json& j,
                                             const std::string& where) {
    if (!j.is_array()) throw format_error(where + ": expected an array");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_string(v, where));
    return out;
}

inline std::vector<double> double_array(const json& j,
                                        const std::string& where) {
    if (!j.is_array()) throw format_error(where + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_double(v, where));
    return out;
}

}  // namespace detail

// -------------------------------------------------------------------------
// JointTable
// -------------------------------------------------------------------------
inline json to_json(const JointTable& t) {
    json j;
    j["vars"] = t.variable_names;
    j["alphabets"] = t.axis_alphabets;
    j["cells"] = t.cells;
    return j;
}

inline JointTable joint_table_from_json(const json& j) {
    check_fields(j, "joint table", {"vars", "alphabets", "cells"});
    JointTable t;
    t.variable_names = detail::string_array(j.at("vars"), "joint table vars");
    if (!j.at("alphabets").is_array())
        throw format_error("joint table alphabets: expected an array");
    for (const auto& a : j.at("alphabets"))
        t.axis_alphabets.push_back(
            detail::string_array(a, "joint table alphabet"));
    t.cells = detail::double_array(j.at("cells"), "joint table cells");
    t.validate();
    return t;
}

// -------------------------------------------------------------------------
// EnergyLedger
// -------------------------------------------------------------------------
inline json to_json(const EnergyLedger& l) {
    json j;
    j["E_cons_J"] = l.E_cons_J;
    j["Q_diss_J"] = l.Q_diss_J;
    j["dU_sys_J"] = l.dU_sys_J;
    j["W_out_J"] = l.W_out_J;
    j["dE_store_J"] = l.dE_store_J;
    j["T_K"] = l.temperature_K;
    return j;
}

inline EnergyLedger ledger_from_json(const json& j) {
    check_fields(j, "energy ledger",
                 {"E_cons_J", "Q_diss_J", "dU_sys_J", "W_out_J", "dE_store_J",
                  "T_K"});
    EnergyLedger l;
    l.E_cons_J = detail::as_double(j.at("E_cons_J"), "E_cons_J");
    l.Q_diss_J = detail::as_double(j.at("Q_diss_J"), "Q_diss_J");
    l.dU_sys_J = detail::as_double(j.at("dU_sys_J"), "dU_sys_J");
    l.W_out_J = detail::as_double(j.at("W_out_J"), "W_out_J");
    l.dE_store_J = detail::as_double(j.at("dE_store_J"), "dE_store_J");
    l.temperature_K = detail::as_double(j.at("T_K"), "T_K");
    l.validate();
    return l;
}

// -------------------------------------------------------------------------
// Channels
// -------------------------------------------------------------------------
inline json to_json(const DiscreteChannel& ch) {
    json j;
    j["inputs"] = ch.inputs;
    j["outputs"] = ch.outputs;
    j["matrix"] = ch.matrix;
    return j;
}

inline DiscreteChannel channel_from_json(const json& j) {
    check_fields(j, "channel", {"inputs", "outputs", "matrix"});
    DiscreteChannel ch;
    ch.inputs = detail::string_array(j.at("inputs"), "channel inputs");
    ch.outputs = detail::string_array(j.at("outputs"), "channel outputs");
    if (!j.at("matrix").is_array())
        throw format_error("channel matrix: expected an array");
    for (const auto& row : j.at("matrix"))
        ch.matrix.push_back(detail::double_array(row, "channel matrix row"));
    ch.validate();
    return ch;
}

inline CostConvention convention_from_string(const std::string& s) {
    if (s == "total") return CostConvention::total;
    if (s == "incremental") return CostConvention::incremental;
    throw format_error("unknown cost convention '" + s +
                       "' (expected total or incremental)");
}

inline json to_json(const CostedChannel& cch) {
    json j = to_json(cch.channel);
    j["cost_J"] = cch.cost_J;
    j["convention"] = to_string(cch.convention);
    j["baseline_energy_J"] = cch.baseline_energy_J;
    j["null_input"] = cch.null_input ? json(*cch.null_input) : json(nullptr);
    return j;
}

inline CostedChannel costed_channel_from_json(const json& j) {
    check_fields(j, "costed channel",
                 {"inputs", "outputs", "matrix", "cost_J", "convention"},
                 {"baseline_energy_J", "null_input"});
    CostedChannel cch;
    json core;
    core["inputs"] = j.at("inputs");
    core["outputs"] = j.at("outputs");
    core["matrix"] = j.at("matrix");
    cch.channel = channel_from_json(core);
    cch.cost_J = detail::double_array(j.at("cost_J"), "cost_J");
    cch.convention =
        convention_from_string(detail::as_string(j.at("convention"), "convention"));
    if (j.contains("baseline_energy_J"))
        cch.baseline_energy_J =
            detail::as_double(j.at("baseline_energy_J"), "baseline_energy_J");
    if (j.contains("null_input") && !j.at("null_input").is_null())
        cch.null_input = detail::as_string(j.at("null_input"), "null_input");
    cch.validate();
    return cch;
}

// -------------------------------------------------------------------------
// MdpSpec
// -------------------------------------------------------------------------
inline json to_json(const MdpSpec& m) {
    json j;
    j["states"] = m.states;
    j["actions"] = m.actions;
    j["transition"] = m.transition;
    json obs = json::object();
    for (std::size_t s = 0; s < m.states.size(); ++s)
        obs[m.states[s]] = m.observation_map[s];
    j["obs"] = obs;
    json cost = json::object();
    for (std::size_t a = 0; a < m.actions.size(); ++a)
        cost[m.actions[a]] = m.action_cost_J[a];
    j["action_cost"] = cost;
    j["initial"] = m.initial_state;
    j["horizon"] = m.horizon;
    j["baseline_energy_J"] = m.baseline_energy_J;
    j["null_action"] = m.null_action ? json(*m.null_action) : json(nullptr);
    return j;
}

inline MdpSpec mdp_from_json(const json& j) {
    check_fields(j, "MDP spec",
                 {"states", "actions", "transition", "obs", "action_cost",
                  "initial", "horizon"},
                 {"baseline_energy_J", "null_action"});
    MdpSpec m;
    m.states = detail::string_array(j.at("states"), "states");
    m.actions = detail::string_array(j.at("actions"), "actions");
    if (!j.at("transition").is_array())
        throw format_error("transition: expected an array");
    for (const auto& per_state : j.at("transition")) {
        if (!per_state.is_array())
            throw format_error("transition: expected nested arrays");
        std::vector<std::vector<double>> rows;
        for (const auto& row : per_state)
            rows.push_back(detail::double_array(row, "transition row"));
        m.transition.push_back(std::move(rows));
    }
    const json& obs = j.at("obs");
    if (!obs.is_object()) throw format_error("obs: expected an object");
    for (const auto& s : m.states) {
        if (!obs.contains(s))
            throw format_error("obs: missing state '" + s + "'");
        m.observation_map.push_back(detail::as_string(obs.at(s), "obs label"));
    }
    if (obs.size() != m.states.size())
        throw format_error("obs: has entries for unknown states");
    const json& cost = j.at("action_cost");
    if (!cost.is_object())
        throw format_error("action_cost: expected an object");
    for (const auto& a : m.actions) {
        if (!cost.contains(a))
            throw format_error("action_cost: missing action '" + a + "'");
        m.action_cost_J.push_back(detail::as_double(cost.at(a), "action cost"));
    }
    if (cost.size() != m.actions.size())
        throw format_error("action_cost: has entries for unknown actions");
    m.initial_state = detail::as_string(j.at("initial"), "initial");
    if (!j.at("horizon").is_number_integer())
        throw format_error("horizon: expected an integer");
    m.horizon = j.at("horizon").get<int>();
    if (j.contains("baseline_energy_J"))
        m.baseline_energy_J =
            detail::as_double(j.at("baseline_energy_J"), "baseline_energy_J");
    if (j.contains("null_action") && !j.at("null_action").is_null())
        m.null_action = detail::as_string(j.at("null_action"), "null_action");
    m.validate();
    return m;
}

// -------------------------------------------------------------------------
// Generative environment + learner file. Keyed maps use "w,x" compound keys,
// so labels themselves must not contain commas.
// -------------------------------------------------------------------------
struct EnvironmentFile {
    GenerativeEnv env;
    LearnerSpec learner;
};

inline json to_json(const EnvironmentFile& f) {
    json j;
    j["latent"] = f.env.latent_alphabet;
    j["prior"] = f.env.prior.probs;
    j["x_alphabet"] = f.env.x_alphabet;
    json obs = json::object();
    for (std::size_t z = 0; z < f.env.latent_alphabet.size(); ++z)
        obs[f.env.latent_alphabet[z]] = f.env.obs_model[z];
    j["obs_model"] = obs;
    json learner;
    learner["states"] = f.learner.state_alphabet;
    learner["initial"] = f.learner.initial.probs;
    json update = json::object();
    for (std::size_t w = 0; w < f.learner.state_alphabet.size(); ++w)
        for (std::size_t x = 0; x < f.env.x_alphabet.size(); ++x)
            update[f.learner.state_alphabet[w] + "," + f.env.x_alphabet[x]] =
                f.learner.update[w][x];
    learner["update"] = update;
    j["learner"] = learner;
    j["ledger"] = to_json(f.learner.episode_energy);
    return j;
}

inline EnvironmentFile environment_from_json(const json& j) {
    check_fields(j, "environment file",
                 {"latent", "prior", "obs_model", "learner", "ledger"},
                 {"x_alphabet"});
    EnvironmentFile f;
    f.env.latent_alphabet = detail::string_array(j.at("latent"), "latent");
    f.env.prior.outcomes = f.env.latent_alphabet;
    f.env.prior.probs = detail::double_array(j.at("prior"), "prior");
    const json& obs = j.at("obs_model");
    if (!obs.is_object()) throw format_error("obs_model: expected an object");
    for (const auto& z : f.env.latent_alphabet) {
        if (!obs.contains(z))
            throw format_error("obs_model: missing latent '" + z + "'");
        f.env.obs_model.push_back(
            detail::double_array(obs.at(z), "obs_model row"));
    }
    if (obs.size() != f.env.latent_alphabet.size())
        throw format_error("obs_model: has rows for unknown latents");
    std::size_t nx = f.env.obs_model.empty() ? 0 : f.env.obs_model[0].size();
    if (j.contains("x_alphabet")) {
        f.env.x_alphabet = detail::string_array(j.at("x_alphabet"), "x_alphabet");
    } else {
        for (std::size_t x = 0; x < nx; ++x)
            f.env.x_alphabet.push_back(std::to_string(x));
    }

    const json& lj = j.at("learner");
    check_fields(lj, "learner", {"states", "initial", "update"});
    f.learner.state_alphabet = detail::string_array(lj.at("states"), "states");
    f.learner.initial.outcomes = f.learner.state_alphabet;
    f.learner.initial.probs = detail::double_array(lj.at("initial"), "initial");
    const json& update = lj.at("update");
    if (!update.is_object())
        throw format_error("learner update: expected an object");
    f.learner.update.resize(f.learner.state_alphabet.size());
    for (std::size_t w = 0; w < f.learner.state_alphabet.size(); ++w) {
        f.learner.update[w].resize(f.env.x_alphabet.size());
        for (std::size_t x = 0; x < f.env.x_alphabet.size(); ++x) {
            std::string key =
                f.learner.state_alphabet[w] + "," + f.env.x_alphabet[x];
            if (!update.contains(key))
                throw format_error("learner update: missing entry '" + key +
                                   "'");
            f.learner.update[w][x] =
                detail::double_array(update.at(key), "update row");
        }
    }
    if (update.size() !=
        f.learner.state_alphabet.size() * f.env.x_alphabet.size())
        throw format_error("learner update: has entries for unknown (w,x) pairs");
    f.learner.episode_energy = ledger_from_json(j.at("ledger"));
    f.env.validate();
    f.learner.validate(f.env.x_alphabet.size());
    return f;
}

// -------------------------------------------------------------------------
// Bipartite process. State lists may be given explicitly; otherwise they are
// derived from the sorted "w,x" energy keys.
// -------------------------------------------------------------------------
inline json to_json(const BipartiteProcess& p) {
    json j;
    j["w_states"] = p.w_states;
    j["x_states"] = p.x_states;
    json energy = json::object();
    for (std::size_t w = 0; w < p.w_states.size(); ++w)
        for (std::size_t x = 0; x < p.x_states.size(); ++x)
            energy[p.w_states[w] + "," + p.x_states[x]] = p.energy_J[w][x];
    j["E_J"] = energy;
    j["data_dist"] = p.data_dist.probs;
    j["T_K"] = p.temperature_K;
    j["rate_scale_hz"] = p.w_rate_scale_hz;
    j["w_init"] = p.w_init.probs;
    return j;
}

inline BipartiteProcess process_from_json(const json& j) {
    check_fields(j, "process spec",
                 {"E_J", "data_dist", "T_K", "rate_scale_hz", "w_init"},
                 {"w_states", "x_states"});
    BipartiteProcess p;
    const json& energy = j.at("E_J");
    if (!energy.is_object()) throw format_error("E_J: expected an object");
    if (j.contains("w_states") && j.contains("x_states")) {
        p.w_states = detail::string_array(j.at("w_states"), "w_states");
        p.x_states = detail::string_array(j.at("x_states"), "x_states");
    } else {
        for (auto it = energy.begin(); it != energy.end(); ++it) {
            auto comma = it.key().find(',');
            if (comma == std::string::npos)
                throw format_error("E_J key '" + it.key() +
                                   "' is not of the form w,x");
            std::string w = it.key().substr(0, comma);
            std::string x = it.key().substr(comma + 1);
            if (std::find(p.w_states.begin(), p.w_states.end(), w) ==
                p.w_states.end())
                p.w_states.push_back(w);
            if (std::find(p.x_states.begin(), p.x_states.end(), x) ==
                p.x_states.end())
                p.x_states.push_back(x);
        }
        std::sort(p.w_states.begin(), p.w_states.end());
        std::sort(p.x_states.begin(), p.x_states.end());
    }
    p.energy_J.assign(p.w_states.size(),
                      std::vector<double>(p.x_states.size(), 0.0));
    for (std::size_t w = 0; w < p.w_states.size(); ++w)
        for (std::size_t x = 0; x < p.x_states.size(); ++x) {
            std::string key = p.w_states[w] + "," + p.x_states[x];
            if (!energy.contains(key))
                throw format_error("E_J: missing entry '" + key + "'");
            p.energy_J[w][x] = detail::as_double(energy.at(key), "E_J value");
        }
    if (energy.size() != p.w_states.size() * p.x_states.size())
        throw format_error("E_J: has entries for unknown (w,x) pairs");
    p.data_dist.outcomes = p.x_states;
    p.data_dist.probs = detail::double_array(j.at("data_dist"), "data_dist");
    p.temperature_K = detail::as_double(j.at("T_K"), "T_K");
    p.w_rate_scale_hz = detail::as_double(j.at("rate_scale_hz"), "rate_scale_hz");
    p.w_init.outcomes = p.w_states;
    p.w_init.probs = detail::double_array(j.at("w_init"), "w_init");
    p.validate();
    return p;
}

inline json to_json(const EpisodeTrace& t) {
    json j;
    j["duration_s"] = t.duration_s;
    j["joint_post"] = to_json(t.joint_post);
    j["Q_diss_J"] = t.Q_diss_J;
    j["dS_sys_J_per_K"] = t.dS_sys_J_per_K;
    j["info_flow_bits"] = t.info_flow_bits;
    return j;
}

// -------------------------------------------------------------------------
// Curve CSV, the plot-ready export.
// -------------------------------------------------------------------------
inline std::string curve_csv(const EmpowermentCurve& curve) {
    std::string out = "budget_J,capacity_bits,lambda_bits_per_J\n";
    for (const auto& pt : curve.points) {
        out += format_double(pt.budget_J);
        out += ',';
        out += format_double(pt.capacity_bits);
        out += ',';
        out += format_double(pt.lambda_bits_per_J);
        out += '\n';
    }
    return out;
}

}  // namespace joulebits

#endif  // JOULEBITS_JSON_IO_HPP

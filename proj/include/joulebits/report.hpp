#ifndef JOULEBITS_REPORT_HPP
#define JOULEBITS_REPORT_HPP

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "joulebits/channel.hpp"
#include "joulebits/epiplexity.hpp"
#include "joulebits/errors.hpp"
#include "joulebits/json_io.hpp"
#include "joulebits/mdl.hpp"
#include "joulebits/thermo.hpp"

namespace joulebits {

inline constexpr const char* report_schema_version = "1";

// -------------------------------------------------------------------------
// The seven-section reporting checklist. A bits/J number is only comparable
// across systems when every section is stated, so reports refuse to validate
// with any section missing.
// -------------------------------------------------------------------------
struct BalanceSection {
    EnergyLedger ledger;
    double negligibility_fraction = 0.01;
    bool balanced = false;
    bool approx_justified = false;  // E_cons ~ Q_diss claimed
};

struct BaselineSection {
    std::string null_action;  // "none" when no null is declared
    double baseline_energy_J = 0.0;
    CostConvention convention = CostConvention::total;
};

struct CoarseGrainEntry {
    std::string variable;
    std::string description;
    std::optional<double> epsilon;
};

struct HorizonSection {
    int horizon_tau = 1;
    std::string episode_definition;
    std::string reset_protocol;
};

struct ThroughputSection {
    std::string description;
    std::optional<double> wall_clock_s;
    std::optional<double> average_power_W;
    std::optional<double> bits_per_s;
};

struct EstimatorSection {
    std::string epiplexity_estimator;
    std::string empowerment_estimator;
    std::string mdl_conventions;
};

struct ReportingChecklist {
    std::optional<std::string> accounting_boundary;
    std::optional<BalanceSection> energy_balance_terms;
    std::optional<BaselineSection> baseline_policy;
    std::optional<std::vector<CoarseGrainEntry>> coarse_graining;
    std::optional<HorizonSection> horizon_sampling;
    std::optional<ThroughputSection> time_throughput;
    std::optional<EstimatorSection> estimator_details;
};

// One violation per missing or empty section, in fixed section order.
inline std::vector<std::string> validate(const ReportingChecklist& c) {
    std::vector<std::string> v;
    if (!c.accounting_boundary || c.accounting_boundary->empty())
        v.push_back("accounting boundary: missing or empty");
    if (!c.energy_balance_terms)
        v.push_back("energy balance terms: missing");
    if (!c.baseline_policy || c.baseline_policy->null_action.empty())
        v.push_back("baseline / null policy: missing");
    if (!c.coarse_graining || c.coarse_graining->empty())
        v.push_back("coarse-graining / noise model: missing or empty");
    if (!c.horizon_sampling || c.horizon_sampling->episode_definition.empty())
        v.push_back("horizon and sampling: missing");
    if (!c.time_throughput || c.time_throughput->description.empty())
        v.push_back("time / throughput: missing");
    if (!c.estimator_details ||
        (c.estimator_details->epiplexity_estimator.empty() &&
         c.estimator_details->empowerment_estimator.empty() &&
         c.estimator_details->mdl_conventions.empty()))
        v.push_back("estimator details: missing");
    return v;
}

// -------------------------------------------------------------------------
// EfficiencyReport: both metrics, the checklist, and the audited bounds.
// -------------------------------------------------------------------------
struct EmpowermentSection {
    EmpowermentCurve curve;
    std::string endpoint = "observation";  // or "state"
    std::optional<double> capacity_per_unit_cost_bits_per_J;
    bool unbounded = false;
};

struct MdlSection {
    MdlReport report;
    std::optional<double> compression_gain_bits;
    std::optional<double> eta_E_mdl_bits_per_J;
};

struct EfficiencyReport {
    std::string schema_version = report_schema_version;
    // CLI invocations echo their full flag set here, making runs
    // self-documenting.
    std::optional<std::map<std::string, std::string>> invocation;
    ReportingChecklist checklist;
    std::optional<EfficiencyRecord> eta_E;
    std::optional<EmpowermentSection> eta_C;
    std::optional<MdlSection> mdl_companion;
    std::vector<BoundVerdict> bound_verdicts;
};

// ---- serialization -------------------------------------------------------

inline json to_json(const ReportingChecklist& c) {
    json j = json::object();
    if (c.accounting_boundary) j["accounting_boundary"] = *c.accounting_boundary;
    if (c.energy_balance_terms) {
        json b;
        b["ledger"] = to_json(c.energy_balance_terms->ledger);
        b["negligibility_fraction"] = c.energy_balance_terms->negligibility_fraction;
        b["balanced"] = c.energy_balance_terms->balanced;
        b["approx_justified"] = c.energy_balance_terms->approx_justified;
        j["energy_balance_terms"] = b;
    }
    if (c.baseline_policy) {
        json b;
        b["null_action"] = c.baseline_policy->null_action;
        b["baseline_energy_J"] = c.baseline_policy->baseline_energy_J;
        b["convention"] = to_string(c.baseline_policy->convention);
        j["baseline_policy"] = b;
    }
    if (c.coarse_graining) {
        json arr = json::array();
        for (const auto& e : *c.coarse_graining) {
            json g;
            g["variable"] = e.variable;
            g["description"] = e.description;
            if (e.epsilon) g["epsilon"] = *e.epsilon;
            arr.push_back(g);
        }
        j["coarse_graining"] = arr;
    }
    if (c.horizon_sampling) {
        json h;
        h["horizon_tau"] = c.horizon_sampling->horizon_tau;
        h["episode_definition"] = c.horizon_sampling->episode_definition;
        h["reset_protocol"] = c.horizon_sampling->reset_protocol;
        j["horizon_sampling"] = h;
    }
    if (c.time_throughput) {
        json t;
        t["description"] = c.time_throughput->description;
        if (c.time_throughput->wall_clock_s)
            t["wall_clock_s"] = *c.time_throughput->wall_clock_s;
        if (c.time_throughput->average_power_W)
            t["average_power_W"] = *c.time_throughput->average_power_W;
        if (c.time_throughput->bits_per_s)
            t["bits_per_s"] = *c.time_throughput->bits_per_s;
        j["time_throughput"] = t;
    }
    if (c.estimator_details) {
        json e;
        e["epiplexity_estimator"] = c.estimator_details->epiplexity_estimator;
        e["empowerment_estimator"] = c.estimator_details->empowerment_estimator;
        e["mdl_conventions"] = c.estimator_details->mdl_conventions;
        j["estimator_details"] = e;
    }
    return j;
}

inline ReportingChecklist checklist_from_json(const json& j) {
    check_fields(j, "checklist", {},
                 {"accounting_boundary", "energy_balance_terms",
                  "baseline_policy", "coarse_graining", "horizon_sampling",
                  "time_throughput", "estimator_details"});
    ReportingChecklist c;
    if (j.contains("accounting_boundary"))
        c.accounting_boundary =
            detail::as_string(j.at("accounting_boundary"), "accounting_boundary");
    if (j.contains("energy_balance_terms")) {
        const json& b = j.at("energy_balance_terms");
        check_fields(b, "energy_balance_terms",
                     {"ledger", "negligibility_fraction", "balanced",
                      "approx_justified"});
        BalanceSection s;
        s.ledger = ledger_from_json(b.at("ledger"));
        s.negligibility_fraction =
            detail::as_double(b.at("negligibility_fraction"),
                              "negligibility_fraction");
        s.balanced = b.at("balanced").get<bool>();
        s.approx_justified = b.at("approx_justified").get<bool>();
        c.energy_balance_terms = s;
    }
    if (j.contains("baseline_policy")) {
        const json& b = j.at("baseline_policy");
        check_fields(b, "baseline_policy",
                     {"null_action", "baseline_energy_J", "convention"});
        BaselineSection s;
        s.null_action = detail::as_string(b.at("null_action"), "null_action");
        s.baseline_energy_J =
            detail::as_double(b.at("baseline_energy_J"), "baseline_energy_J");
        s.convention = convention_from_string(
            detail::as_string(b.at("convention"), "convention"));
        c.baseline_policy = s;
    }
    if (j.contains("coarse_graining")) {
        const json& arr = j.at("coarse_graining");
        if (!arr.is_array())
            throw format_error("coarse_graining: expected an array");
        std::vector<CoarseGrainEntry> entries;
        for (const auto& g : arr) {
            check_fields(g, "coarse_graining entry", {"variable", "description"},
                         {"epsilon"});
            CoarseGrainEntry e;
            e.variable = detail::as_string(g.at("variable"), "variable");
            e.description = detail::as_string(g.at("description"), "description");
            if (g.contains("epsilon"))
                e.epsilon = detail::as_double(g.at("epsilon"), "epsilon");
            entries.push_back(e);
        }
        c.coarse_graining = entries;
    }
    if (j.contains("horizon_sampling")) {
        const json& h = j.at("horizon_sampling");
        check_fields(h, "horizon_sampling",
                     {"horizon_tau", "episode_definition", "reset_protocol"});
        HorizonSection s;
        if (!h.at("horizon_tau").is_number_integer())
            throw format_error("horizon_tau: expected an integer");
        s.horizon_tau = h.at("horizon_tau").get<int>();
        s.episode_definition =
            detail::as_string(h.at("episode_definition"), "episode_definition");
        s.reset_protocol =
            detail::as_string(h.at("reset_protocol"), "reset_protocol");
        c.horizon_sampling = s;
    }
    if (j.contains("time_throughput")) {
        const json& t = j.at("time_throughput");
        check_fields(t, "time_throughput", {"description"},
                     {"wall_clock_s", "average_power_W", "bits_per_s"});
        ThroughputSection s;
        s.description = detail::as_string(t.at("description"), "description");
        if (t.contains("wall_clock_s"))
            s.wall_clock_s = detail::as_double(t.at("wall_clock_s"), "wall_clock_s");
        if (t.contains("average_power_W"))
            s.average_power_W =
                detail::as_double(t.at("average_power_W"), "average_power_W");
        if (t.contains("bits_per_s"))
            s.bits_per_s = detail::as_double(t.at("bits_per_s"), "bits_per_s");
        c.time_throughput = s;
    }
    if (j.contains("estimator_details")) {
        const json& e = j.at("estimator_details");
        check_fields(e, "estimator_details",
                     {"epiplexity_estimator", "empowerment_estimator",
                      "mdl_conventions"});
        EstimatorSection s;
        s.epiplexity_estimator =
            detail::as_string(e.at("epiplexity_estimator"), "epiplexity_estimator");
        s.empowerment_estimator =
            detail::as_string(e.at("empowerment_estimator"),
                              "empowerment_estimator");
        s.mdl_conventions =
            detail::as_string(e.at("mdl_conventions"), "mdl_conventions");
        c.estimator_details = s;
    }
    return c;
}

inline json to_json(const EfficiencyReport& r) {
    json j;
    j["schema_version"] = r.schema_version;
    if (r.invocation) {
        json inv = json::object();
        for (const auto& [k, v] : *r.invocation) inv[k] = v;
        j["invocation"] = inv;
    }
    j["checklist"] = to_json(r.checklist);
    if (r.eta_E) {
        json e;
        e["delta_I_bits"] = r.eta_E->delta_I_bits;
        e["E_cons_J"] = r.eta_E->E_cons_J;
        e["Q_diss_J"] = r.eta_E->Q_diss_J;
        e["eta_E_bits_per_J"] = r.eta_E->eta_E_bits_per_J;
        if (r.eta_E->eta_tilde_E_bits_per_J)
            e["eta_tilde_E_bits_per_J"] = *r.eta_E->eta_tilde_E_bits_per_J;
        if (r.eta_E->landauer_fraction)
            e["landauer_fraction"] = *r.eta_E->landauer_fraction;
        j["eta_E"] = e;
    }
    if (r.eta_C) {
        json c;
        c["convention"] = to_string(r.eta_C->curve.convention);
        c["endpoint"] = r.eta_C->endpoint;
        c["unbounded"] = r.eta_C->unbounded;
        if (r.eta_C->capacity_per_unit_cost_bits_per_J)
            c["capacity_per_unit_cost_bits_per_J"] =
                *r.eta_C->capacity_per_unit_cost_bits_per_J;
        json pts = json::array();
        for (const auto& pt : r.eta_C->curve.points) {
            json p;
            p["budget_J"] = pt.budget_J;
            p["capacity_bits"] = pt.capacity_bits;
            p["lambda_bits_per_J"] = pt.lambda_bits_per_J;
            p["inputs"] = pt.input_dist.outcomes;
            p["input_probs"] = pt.input_dist.probs;
            pts.push_back(p);
        }
        c["curve"] = pts;
        j["eta_C"] = c;
    }
    if (r.mdl_companion) {
        json m;
        m["label"] = "operational";  // never converted to the normative I(W;Z)
        m["L_M_bits"] = r.mdl_companion->report.L_M_bits;
        m["L_X_given_M_bits"] = r.mdl_companion->report.L_X_given_M_bits;
        m["total_bits"] = r.mdl_companion->report.total_bits;
        m["chosen_order"] = r.mdl_companion->report.chosen_order;
        if (r.mdl_companion->compression_gain_bits)
            m["compression_gain_bits"] = *r.mdl_companion->compression_gain_bits;
        if (r.mdl_companion->eta_E_mdl_bits_per_J)
            m["eta_E_mdl_bits_per_J"] = *r.mdl_companion->eta_E_mdl_bits_per_J;
        j["mdl_companion"] = m;
    }
    json verdicts = json::array();
    for (const auto& v : r.bound_verdicts) {
        json vj;
        vj["name"] = v.name;
        vj["lhs"] = v.lhs;
        vj["rhs"] = v.rhs;
        vj["units"] = v.units;
        vj["satisfied"] = v.satisfied;
        vj["slack"] = v.slack;
        vj["note"] = v.note;
        verdicts.push_back(vj);
    }
    j["bound_verdicts"] = verdicts;
    return j;
}

inline EfficiencyReport report_from_json(const json& j) {
    check_fields(j, "report", {"schema_version", "checklist", "bound_verdicts"},
                 {"invocation", "eta_E", "eta_C", "mdl_companion"});
    EfficiencyReport r;
    r.schema_version = detail::as_string(j.at("schema_version"), "schema_version");
    if (r.schema_version != report_schema_version)
        throw format_error("unsupported schema_version '" + r.schema_version +
                           "' (expected " + report_schema_version + ")");
    if (j.contains("invocation")) {
        const json& inv = j.at("invocation");
        if (!inv.is_object())
            throw format_error("invocation: expected an object");
        std::map<std::string, std::string> m;
        for (auto it = inv.begin(); it != inv.end(); ++it)
            m[it.key()] = detail::as_string(it.value(), "invocation value");
        r.invocation = m;
    }
    r.checklist = checklist_from_json(j.at("checklist"));
    if (j.contains("eta_E")) {
        const json& e = j.at("eta_E");
        check_fields(e, "eta_E",
                     {"delta_I_bits", "E_cons_J", "Q_diss_J", "eta_E_bits_per_J"},
                     {"eta_tilde_E_bits_per_J", "landauer_fraction"});
        EfficiencyRecord rec;
        rec.delta_I_bits = detail::as_double(e.at("delta_I_bits"), "delta_I_bits");
        rec.E_cons_J = detail::as_double(e.at("E_cons_J"), "E_cons_J");
        rec.Q_diss_J = detail::as_double(e.at("Q_diss_J"), "Q_diss_J");
        rec.eta_E_bits_per_J =
            detail::as_double(e.at("eta_E_bits_per_J"), "eta_E_bits_per_J");
        if (e.contains("eta_tilde_E_bits_per_J")) {
            if (!(rec.Q_diss_J > 0.0))
                throw format_error(
                    "eta_tilde_E is only reportable when Q_diss > 0");
            rec.eta_tilde_E_bits_per_J = detail::as_double(
                e.at("eta_tilde_E_bits_per_J"), "eta_tilde_E_bits_per_J");
        }
        if (e.contains("landauer_fraction"))
            rec.landauer_fraction =
                detail::as_double(e.at("landauer_fraction"), "landauer_fraction");
        r.eta_E = rec;
    }
    if (j.contains("eta_C")) {
        const json& c = j.at("eta_C");
        check_fields(c, "eta_C", {"convention", "endpoint", "unbounded", "curve"},
                     {"capacity_per_unit_cost_bits_per_J"});
        EmpowermentSection s;
        s.curve.convention = convention_from_string(
            detail::as_string(c.at("convention"), "convention"));
        s.endpoint = detail::as_string(c.at("endpoint"), "endpoint");
        if (s.endpoint != "observation" && s.endpoint != "state")
            throw format_error("endpoint must be observation or state");
        s.unbounded = c.at("unbounded").get<bool>();
        if (c.contains("capacity_per_unit_cost_bits_per_J"))
            s.capacity_per_unit_cost_bits_per_J =
                detail::as_double(c.at("capacity_per_unit_cost_bits_per_J"),
                                  "capacity_per_unit_cost_bits_per_J");
        if (!c.at("curve").is_array())
            throw format_error("curve: expected an array");
        for (const auto& p : c.at("curve")) {
            check_fields(p, "curve point",
                         {"budget_J", "capacity_bits", "lambda_bits_per_J",
                          "inputs", "input_probs"});
            CurvePoint pt;
            pt.budget_J = detail::as_double(p.at("budget_J"), "budget_J");
            pt.capacity_bits =
                detail::as_double(p.at("capacity_bits"), "capacity_bits");
            pt.lambda_bits_per_J =
                detail::as_double(p.at("lambda_bits_per_J"), "lambda_bits_per_J");
            pt.input_dist.outcomes =
                detail::string_array(p.at("inputs"), "inputs");
            pt.input_dist.probs =
                detail::double_array(p.at("input_probs"), "input_probs");
            s.curve.points.push_back(std::move(pt));
        }
        r.eta_C = s;
    }
    if (j.contains("mdl_companion")) {
        const json& m = j.at("mdl_companion");
        check_fields(m, "mdl_companion",
                     {"label", "L_M_bits", "L_X_given_M_bits", "total_bits",
                      "chosen_order"},
                     {"compression_gain_bits", "eta_E_mdl_bits_per_J"});
        MdlSection s;
        s.report.L_M_bits = detail::as_double(m.at("L_M_bits"), "L_M_bits");
        s.report.L_X_given_M_bits =
            detail::as_double(m.at("L_X_given_M_bits"), "L_X_given_M_bits");
        s.report.total_bits = detail::as_double(m.at("total_bits"), "total_bits");
        if (!m.at("chosen_order").is_number_integer())
            throw format_error("chosen_order: expected an integer");
        s.report.chosen_order = m.at("chosen_order").get<int>();
        if (m.contains("compression_gain_bits"))
            s.compression_gain_bits = detail::as_double(
                m.at("compression_gain_bits"), "compression_gain_bits");
        if (m.contains("eta_E_mdl_bits_per_J"))
            s.eta_E_mdl_bits_per_J = detail::as_double(
                m.at("eta_E_mdl_bits_per_J"), "eta_E_mdl_bits_per_J");
        r.mdl_companion = s;
    }
    for (const auto& vj : j.at("bound_verdicts")) {
        check_fields(vj, "bound verdict",
                     {"name", "lhs", "rhs", "units", "satisfied", "slack",
                      "note"});
        BoundVerdict v;
        v.name = detail::as_string(vj.at("name"), "name");
        v.lhs = detail::as_double(vj.at("lhs"), "lhs");
        v.rhs = detail::as_double(vj.at("rhs"), "rhs");
        v.units = detail::as_string(vj.at("units"), "units");
        v.satisfied = vj.at("satisfied").get<bool>();
        v.slack = detail::as_double(vj.at("slack"), "slack");
        v.note = detail::as_string(vj.at("note"), "note");
        r.bound_verdicts.push_back(v);
    }
    return r;
}

// Serialize-parse round trip; canonical serialization makes this byte-stable.
inline EfficiencyReport round_trip(const EfficiencyReport& r) {
    return report_from_json(parse_json(canonical_json(to_json(r)), "report"));
}

// ---- rendering -----------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

// Fixed-layout plain-text summary; deterministic for fixed input.
inline std::string render_summary(const EfficiencyReport& r) {
    std::string out;
    out += "== efficiency report (schema " + r.schema_version + ") ==\n";

    out += "\nlearning efficiency (eta_E)\n";
    if (r.eta_E) {
        const auto& e = *r.eta_E;
        out += "  delta_I:           " + detail::fmt(e.delta_I_bits) + " bits\n";
        out += "  E_cons:            " + detail::fmt(e.E_cons_J) + " J\n";
        out += "  Q_diss:            " + detail::fmt(e.Q_diss_J) + " J\n";
        out += "  eta_E:             " + detail::fmt(e.eta_E_bits_per_J) +
               " bits/J\n";
        if (e.eta_tilde_E_bits_per_J)
            out += "  eta_tilde_E:       " +
                   detail::fmt(*e.eta_tilde_E_bits_per_J) + " bits/J\n";
        if (e.landauer_fraction) {
            out += "  landauer fraction: " + detail::fmt(*e.landauer_fraction);
            if (*e.landauer_fraction > 1.0 + 1e-12)
                out += "  VIOLATION: exceeds 1, physically impossible in a "
                       "closed cycle";
            out += "\n";
        }
    } else {
        out += "  not evaluated\n";
    }

    out += "\nempowerment (eta_C)\n";
    if (r.eta_C) {
        const auto& c = *r.eta_C;
        out += "  convention: " + std::string(to_string(c.curve.convention)) +
               "\n";
        out += "  endpoint:   " + c.endpoint + "\n";
        if (c.capacity_per_unit_cost_bits_per_J) {
            out += "  capacity per unit cost: " +
                   detail::fmt(*c.capacity_per_unit_cost_bits_per_J) +
                   " bits/J";
            if (c.unbounded) out += " (unbounded; largest finite candidate)";
            out += "\n";
        } else if (c.unbounded) {
            out += "  capacity per unit cost: unbounded\n";
        }
        for (const auto& pt : c.curve.points)
            out += "  budget " + detail::fmt(pt.budget_J) + " J -> " +
                   detail::fmt(pt.capacity_bits) + " bits (lambda " +
                   detail::fmt(pt.lambda_bits_per_J) + " bits/J)\n";
    } else {
        out += "  not evaluated\n";
    }

    out += "\nmdl companion (operational)\n";
    if (r.mdl_companion) {
        const auto& m = *r.mdl_companion;
        out += "  chosen order: " + std::to_string(m.report.chosen_order) + "\n";
        out += "  L_M: " + detail::fmt(m.report.L_M_bits) + " bits, L_X|M: " +
               detail::fmt(m.report.L_X_given_M_bits) + " bits, total: " +
               detail::fmt(m.report.total_bits) + " bits\n";
        if (m.compression_gain_bits)
            out += "  compression gain: " +
                   detail::fmt(*m.compression_gain_bits) + " bits\n";
        if (m.eta_E_mdl_bits_per_J)
            out += "  eta_E_mdl: " + detail::fmt(*m.eta_E_mdl_bits_per_J) +
                   " bits/J\n";
    } else {
        out += "  not evaluated\n";
    }

    out += "\nbound verdicts\n";
    if (r.bound_verdicts.empty()) out += "  none\n";
    for (const auto& v : r.bound_verdicts) {
        out += v.satisfied ? "  OK        " : "  VIOLATION ";
        out += v.name + ": " + detail::fmt(v.lhs) + " <= " + detail::fmt(v.rhs) +
               " " + v.units + " (slack " + detail::fmt(v.slack) + ")";
        if (!v.note.empty()) out += " [" + v.note + "]";
        out += "\n";
    }

    auto violations = validate(r.checklist);
    out += "\nchecklist: ";
    if (violations.empty()) {
        out += "complete (7/7 sections)\n";
    } else {
        out += std::to_string(violations.size()) + " violation(s)\n";
        for (const auto& v : violations) out += "  - " + v + "\n";
    }
    return out;
}

}  // namespace joulebits

#endif  // JOULEBITS_REPORT_HPP

#ifndef JOULEBITS_THERMO_HPP
#define JOULEBITS_THERMO_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "joulebits/errors.hpp"

namespace joulebits {

// Exact SI Boltzmann constant, J/K.
inline constexpr double k_boltzmann = 1.380649e-23;

// k_B T ln2 in joules: the energy of one reliably reusable bit at T.
inline double landauer_joules_per_bit(double temperature_K) {
    return k_boltzmann * temperature_K * std::numbers::ln2;
}

struct LandauerBenchmark {
    double temperature_K;
    double joules_per_bit;
    double bits_per_joule;
};

inline LandauerBenchmark landauer_scale(double temperature_K) {
    if (!(temperature_K > 0.0))
        throw validation_error("temperature must be > 0 K");
    double jpb = landauer_joules_per_bit(temperature_K);
    return {temperature_K, jpb, 1.0 / jpb};
}

// E_cons = Q_diss + dU_sys + W_out + dE_store at bath temperature T.
// Values are declared by the experimenter; this module audits them.
struct EnergyLedger {
    double E_cons_J = 0.0;
    double Q_diss_J = 0.0;
    double dU_sys_J = 0.0;
    double W_out_J = 0.0;
    double dE_store_J = 0.0;
    double temperature_K = 300.0;

    void validate() const {
        if (!(temperature_K > 0.0))
            throw validation_error("ledger temperature must be > 0 K");
        if (!(E_cons_J >= 0.0))
            throw validation_error("E_cons must be >= 0 J");
        for (double v : {Q_diss_J, dU_sys_J, W_out_J, dE_store_J})
            if (!std::isfinite(v))
                throw validation_error("ledger terms must be finite");
    }
};

struct BalanceCheck {
    double residual_J;       // E_cons - (Q_diss + dU_sys + W_out + dE_store)
    bool balanced;           // |residual| within tolerance
    bool approx_justified;   // E_cons ~ Q_diss: all other terms negligible
    double negligibility_threshold_J;
};

// negligibility_fraction is the reporting convention for when E_cons ~ Q_diss
// may be claimed: every non-heat term below this fraction of E_cons.
inline BalanceCheck balance_residual(const EnergyLedger& l,
                                     double negligibility_fraction = 0.01,
                                     double relative_tolerance = 1e-9) {
    l.validate();
    double residual =
        l.E_cons_J - (l.Q_diss_J + l.dU_sys_J + l.W_out_J + l.dE_store_J);
    double scale = std::abs(l.E_cons_J);
    for (double v : {l.Q_diss_J, l.dU_sys_J, l.W_out_J, l.dE_store_J})
        scale = std::max(scale, std::abs(v));
    bool balanced = std::abs(residual) <= relative_tolerance * std::max(scale, 1e-300);
    double threshold = negligibility_fraction * l.E_cons_J;
    bool justified = balanced && std::abs(l.dU_sys_J) <= threshold &&
                     std::abs(l.W_out_J) <= threshold &&
                     std::abs(l.dE_store_J) <= threshold;
    return {residual, balanced, justified, threshold};
}

struct EntropyProduction {
    double sigma_J_per_K;  // dS_sys + Q_diss/T
    double dimensionless;  // sigma / k_B
    double bit_equivalent; // sigma / (k_B ln2)
};

inline EntropyProduction entropy_production(double dS_sys_J_per_K,
                                            double Q_diss_J,
                                            double temperature_K) {
    if (!(temperature_K > 0.0))
        throw validation_error("temperature must be > 0 K");
    double sigma = dS_sys_J_per_K + Q_diss_J / temperature_K;
    return {sigma, sigma / k_boltzmann,
            sigma / (k_boltzmann * std::numbers::ln2)};
}

// Physical system-entropy change of a memory whose Shannon entropy moved by
// dH bits.
inline double system_entropy_from_bits(double dH_bits) {
    return k_boltzmann * std::numbers::ln2 * dH_bits;
}

// Bound checks are reported, never thrown: the point is auditing stated
// numbers, including physically impossible ones.
struct BoundVerdict {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string units;
    bool satisfied = true;
    double slack = 0.0;  // rhs - lhs, same units as lhs
    std::string note;
};

inline BoundVerdict make_verdict(std::string name, double lhs, double rhs,
                                 std::string units, std::string note = "",
                                 double relative_tolerance = 1e-9) {
    double tol = relative_tolerance * std::max(std::abs(lhs), std::abs(rhs));
    BoundVerdict v;
    v.name = std::move(name);
    v.lhs = lhs;
    v.rhs = rhs;
    v.units = std::move(units);
    v.satisfied = lhs <= rhs + tol;
    v.slack = rhs - lhs;
    v.note = std::move(note);
    return v;
}

struct CorollaryResult {
    BoundVerdict verdict;  // required heat (J) vs declared Q_diss
    std::optional<double> eta_tilde_bits_per_J;  // delta_I / Q_diss
    std::optional<double> landauer_fraction;     // eta_tilde * k_B T ln2
};

// Q_diss >= k_B T ln2 * delta_I - T * dS_sys. With dS_sys = 0 this is the
// closed-cycle Landauer benchmark, and eta_tilde is comparable to
// 1/(k_B T ln2).
inline CorollaryResult corollary_check(double delta_I_bits,
                                       double dS_sys_J_per_K, double Q_diss_J,
                                       double temperature_K) {
    if (!(temperature_K > 0.0))
        throw validation_error("temperature must be > 0 K");
    double required = landauer_joules_per_bit(temperature_K) * delta_I_bits -
                      temperature_K * dS_sys_J_per_K;
    CorollaryResult r;
    r.verdict = make_verdict("corollary_landauer", required, Q_diss_J, "J",
                             "minimum dissipated heat for the declared "
                             "information gain");
    if (Q_diss_J > 0.0) {
        r.eta_tilde_bits_per_J = delta_I_bits / Q_diss_J;
        r.landauer_fraction =
            *r.eta_tilde_bits_per_J * landauer_joules_per_bit(temperature_K);
    }
    return r;
}

// dI_agent + dI_env <= Sigma_tot/(k_B ln2). A conceptual yardstick, not a
// universal identity.
inline BoundVerdict closed_cycle_budget(double dI_agent_bits,
                                        double dI_env_bits,
                                        double Sigma_tot_J_per_K) {
    double lhs = dI_agent_bits + dI_env_bits;
    double rhs = Sigma_tot_J_per_K / (k_boltzmann * std::numbers::ln2);
    return make_verdict("closed_cycle_budget", lhs, rhs, "bits",
                        "conceptual yardstick, not a universal identity");
}

}  // namespace joulebits

#endif  // JOULEBITS_THERMO_HPP

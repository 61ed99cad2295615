#ifndef JOULEBITS_ERRORS_HPP
#define JOULEBITS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace joulebits {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed value: negative mass, unnormalized distribution, bad field.
class validation_error : public error {
public:
    using error::error;
};

// Unknown variable / outcome / action name.
class lookup_error : public error {
public:
    using error::error;
};

// A size guard tripped (joint table or unrolled channel too large).
class capacity_error : public error {
public:
    using error::error;
};

// Quantizer input outside the declared range under the `error` policy.
class range_error : public error {
public:
    using error::error;
};

// Inputs violate a declared reporting convention (e.g. interactive data
// generation fed to a passive-setting metric).
class convention_error : public error {
public:
    using error::error;
};

// Missing piece of configuration (e.g. incremental costing without a
// declared null input).
class configuration_error : public error {
public:
    using error::error;
};

// A well-posedness failure, e.g. capacity per unit cost with all costs zero.
class degeneracy_error : public error {
public:
    using error::error;
};

// Requested budget below the cheapest achievable expected cost.
class infeasibility_error : public error {
public:
    infeasibility_error(const std::string& msg, double min_expected_cost_J)
        : error(msg), min_expected_cost_J(min_expected_cost_J) {}

    double min_expected_cost_J;
};

// An iterative solver ran out of iterations; carries the bracket it reached.
class iteration_limit_error : public error {
public:
    iteration_limit_error(const std::string& msg, double lower, double upper)
        : error(msg), lower(lower), upper(upper) {}

    double lower;
    double upper;
};

// Unparseable or schema-violating file content.
class format_error : public error {
public:
    using error::error;
};

}  // namespace joulebits

#endif  // JOULEBITS_ERRORS_HPP

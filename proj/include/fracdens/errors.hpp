#pragma once

#include <stdexcept>
#include <string>

namespace fracdens {

enum class ErrorCode {
    Domain = 1,
    Overflow,
    Accuracy,
    NonSmoothPoint,
    Gluing,
    UnsupportedHistory,
    Monotonicity,
    Range,
    SpanFailure,
    ApproximationFailure,
    FitFailure,
    ConstructionFailure,
    BoundarySingularity,
    Parse,
    InvalidConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Quadrature budget exhausted; carries the best value found.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double best, double err)
        : Error(ErrorCode::Accuracy, what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

class GluingError : public Error {
public:
    GluingError(const std::string& what, int order, double mismatch)
        : Error(ErrorCode::Gluing, what), violated_order(order), mismatch(mismatch) {}
    int violated_order;
    double mismatch;
};

class StageError : public Error {
public:
    StageError(ErrorCode code, const std::string& what, std::string stage, double achieved)
        : Error(code, what), stage(std::move(stage)), achieved_error(achieved) {}
    std::string stage;
    double achieved_error;
};

[[noreturn]] void throw_domain(const std::string& what);

}  // namespace fracdens

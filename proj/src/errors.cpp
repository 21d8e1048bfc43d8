#include "fracdens/errors.hpp"

namespace fracdens {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Overflow: return "overflow";
        case ErrorCode::Accuracy: return "accuracy";
        case ErrorCode::NonSmoothPoint: return "non-smooth-point";
        case ErrorCode::Gluing: return "gluing";
        case ErrorCode::UnsupportedHistory: return "unsupported-history";
        case ErrorCode::Monotonicity: return "monotonicity";
        case ErrorCode::Range: return "range";
        case ErrorCode::SpanFailure: return "span-failure";
        case ErrorCode::ApproximationFailure: return "approximation-failure";
        case ErrorCode::FitFailure: return "fit-failure";
        case ErrorCode::ConstructionFailure: return "construction-failure";
        case ErrorCode::BoundarySingularity: return "boundary-singularity";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::InvalidConfig: return "invalid-config";
    }
    return "unknown";
}

void throw_domain(const std::string& what) { throw Error(ErrorCode::Domain, what); }

}  // namespace fracdens

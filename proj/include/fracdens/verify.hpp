#pragma once

#include <string>
#include <vector>

#include "fracdens/expr.hpp"

namespace fracdens {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double tolerance = 0.0;  // threshold it was compared against
    std::string detail;
};

struct VerifyOptions {
    std::vector<std::string> suites;  // subset of verify_suite_names(); empty is rejected
    std::vector<FractionalOrder> orders{{1, 0.5}, {2, 1.5}, {3, 2.25}};
    double kappa_scale = 1.0;  // fault injection: multiplies the reference kappa of the asymptotic suite
    unsigned seed = 7;
};

// "beta", "equiv", "oracle", "asymptotic"
const std::vector<std::string>& verify_suite_names();

std::vector<CheckResult> run_verify(const VerifyOptions& opts);

}  // namespace fracdens

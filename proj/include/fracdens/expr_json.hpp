#pragma once

#include <string>

#include "fracdens/expr.hpp"

namespace fracdens {

// Inverse of Expr::to_json; throws a parse error on unknown kinds or missing fields.
Expr expr_from_json(const json& j);

// {"expr": ..., "unbounded_below": bool}
PsiFunction psi_from_json(const json& j);

// JSON text with every floating-point number written to 17 significant digits;
// infinities become the strings "inf" and "-inf", NaN becomes null.
std::string dump_json(const json& j, int indent = 2);

}  // namespace fracdens

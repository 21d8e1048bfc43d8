#pragma once

#include <string>

#include "fracdens/expr.hpp"

namespace fracdens {

// Parses an arithmetic formula in t: numbers, t, + - * / ^, parentheses, implicit
// multiplication ("3t"), constants pi and e, and sin/cos/exp/log/sqrt.
// Polynomial formulas become Polynomial expressions; anything else is a formula leaf
// differentiated by truncated Taylor arithmetic.
Expr parse_formula(const std::string& text);

}  // namespace fracdens

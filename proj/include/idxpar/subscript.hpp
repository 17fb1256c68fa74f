#pragma once

#include <optional>
#include <set>
#include <string>

#include "idxpar/ast.hpp"
#include "idxpar/symexpr.hpp"

namespace idxpar {

// Syntactic conversion of an AST expression to canonical symbolic form.
// Names in `loop_indexes` become LoopIndex atoms, everything else Var or
// ArrayElem; rank-2 reads and non-affine products become ⊥.
SymExpr expr_to_sym(const Expr& e, const std::set<std::string>& loop_indexes);

// SimpleOffset(k) iff the subscript is i+k after constant folding, i being
// the innermost enclosing loop index. Total: nullopt means NonSimple.
std::optional<long long> classify_subscript(const Expr& e, const std::string& loop_index);

}  // namespace idxpar

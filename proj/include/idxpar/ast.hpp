#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace idxpar {

enum class BaseType { Int, Float };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

// Expression tree for the kernel language. Integer arithmetic only;
// float-typed values exist in programs but are never analyzed.
struct Expr {
  enum class Kind { IntLit, Ref, Binary };
  Kind kind = Kind::IntLit;
  int line = 0, col = 0;

  long long value = 0;              // IntLit
  std::string name;                 // Ref (scalar, param, or array base)
  std::vector<ExprPtr> subscripts;  // Ref: empty for scalars, 1 or 2 for arrays
  char op = 0;                      // Binary: '+', '-', '*'
  ExprPtr lhs, rhs;

  ExprPtr clone() const;

  static ExprPtr lit(long long v, int line = 0, int col = 0);
  static ExprPtr ref(std::string n, int line = 0, int col = 0);
  static ExprPtr binary(char op, ExprPtr l, ExprPtr r);
};

struct Cond {
  ExprPtr lhs;
  std::string op;  // == != < <= > >=
  ExprPtr rhs;
  int line = 0, col = 0;
};

// Assignment target: scalar, or one-dimensional array element.
struct LValue {
  std::string name;
  ExprPtr subscript;  // null for scalars
  int line = 0, col = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Assign, If, For };
  Kind kind = Kind::Assign;
  int line = 0, col = 0;

  // Assign
  LValue target;
  ExprPtr rhs;
  bool desugared_post_inc = false;  // `x = x + 1` inserted for an embedded `x++`

  // If
  Cond cond;
  std::vector<StmtPtr> then_block;
  std::vector<StmtPtr> else_block;

  // For: canonical `for (v = lower; v < upper; v++)`. `<=` bounds are
  // normalized at parse time by adding 1 to the upper expression.
  std::string index_var;
  ExprPtr lower;
  ExprPtr upper;
  std::vector<StmtPtr> body;

  std::string loop_id() const { return "loop@" + std::to_string(line); }
};

struct ScalarDecl {
  std::string name;
  BaseType type = BaseType::Int;
  int line = 0;
};

struct ArrayDecl {
  std::string name;
  BaseType type = BaseType::Int;
  std::vector<ExprPtr> extents;  // rank 1 or 2
  int line = 0;
};

struct Program {
  std::vector<std::string> params;
  std::vector<ScalarDecl> scalars;
  std::vector<ArrayDecl> arrays;
  std::vector<StmtPtr> stmts;

  bool is_param(const std::string& n) const;
  const ScalarDecl* scalar(const std::string& n) const;
  const ArrayDecl* array(const std::string& n) const;
  bool declared(const std::string& n) const;

  // All loops in the program keyed by loop id, in source order.
  std::vector<const Stmt*> all_loops() const;
  const Stmt* find_loop(const std::string& id) const;
};

}  // namespace idxpar

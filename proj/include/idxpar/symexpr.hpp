#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace idxpar {

class SymExpr;

// Opaque symbols appearing in symbolic expressions.
//
//   BigLambda(x)   value of scalar x at loop entry
//   Lambda(x)      value of scalar x at iteration entry
//   LoopIndex(i)   a loop index variable
//   Var(p)         a free program variable (usually a size parameter)
//   ArrayElem      the value stored at a[arg] at evaluation time
//   TriSum         arg*(arg-1)/2, the closed form of sum 0..arg-1
struct Atom {
  enum class Kind { BigLambda, Lambda, ArrayElem, LoopIndex, Var, TriSum };
  Kind kind = Kind::Var;
  std::string name;
  std::shared_ptr<const SymExpr> arg;  // ArrayElem subscript / TriSum count

  static Atom big_lambda(std::string owner);
  static Atom lambda(std::string owner);
  static Atom loop_index(std::string n);
  static Atom var(std::string n);
  static Atom array_elem(std::string array, SymExpr idx);
  static Atom tri_sum(SymExpr n);

  static int cmp(const Atom& a, const Atom& b);
};

struct AtomLess {
  bool operator()(const Atom& a, const Atom& b) const { return Atom::cmp(a, b) < 0; }
};

// Bindings for concrete evaluation of a SymExpr.
struct Valuation {
  std::function<std::optional<long long>(const std::string&)> var;         // params/vars
  std::function<std::optional<long long>(const std::string&)> index;       // loop indexes
  std::function<std::optional<long long>(const std::string&)> lambda;      // λ(x)
  std::function<std::optional<long long>(const std::string&)> big_lambda;  // Λ(x)
  std::function<std::optional<long long>(const std::string&, long long)> array;
};

// Integer symbolic expression kept in canonical linear form: a literal
// constant plus a sum of literal-coefficient atom terms. Anything that
// cannot be represented that way is the absorbing unknown, bottom (⊥).
class SymExpr {
 public:
  SymExpr() = default;  // zero

  static SymExpr literal(long long v);
  static SymExpr bottom();
  static SymExpr atom(Atom a);
  static SymExpr var(std::string n) { return atom(Atom::var(std::move(n))); }
  static SymExpr loop_index(std::string n) { return atom(Atom::loop_index(std::move(n))); }
  static SymExpr lambda(std::string owner) { return atom(Atom::lambda(std::move(owner))); }
  static SymExpr big_lambda(std::string owner) { return atom(Atom::big_lambda(std::move(owner))); }
  static SymExpr array_elem(std::string array, SymExpr idx);
  static SymExpr tri_sum(SymExpr n);

  bool is_bottom() const { return bottom_; }
  bool is_literal() const { return !bottom_ && terms_.empty(); }
  std::optional<long long> as_literal() const;
  long long constant() const { return constant_; }
  const std::map<Atom, long long, AtomLess>& terms() const { return terms_; }

  // coefficient of an atom (0 when absent)
  long long coeff(const Atom& a) const;

  SymExpr operator+(const SymExpr& o) const;
  SymExpr operator-(const SymExpr& o) const;
  SymExpr operator+(long long c) const { return *this + literal(c); }
  SymExpr operator-(long long c) const { return *this - literal(c); }
  SymExpr negated() const { return scaled(-1); }
  SymExpr scaled(long long c) const;
  // Product; defined only when at least one factor is a literal.
  static std::optional<SymExpr> mul(const SymExpr& a, const SymExpr& b);

  bool operator==(const SymExpr& o) const { return cmp(*this, o) == 0; }
  bool operator!=(const SymExpr& o) const { return cmp(*this, o) != 0; }
  static int cmp(const SymExpr& a, const SymExpr& b);

  bool contains(const std::function<bool(const Atom&)>& pred) const;

  // Whole-atom substitution; recurses into ArrayElem/TriSum arguments.
  // Substituting anything into bottom (or substituting bottom in) yields
  // bottom.
  SymExpr substitute(const std::function<std::optional<SymExpr>(const Atom&)>& fn) const;

  std::optional<long long> eval(const Valuation& v) const;

  // Rendering; `lambda_owner` lets λ/Λ of that scalar print bare.
  std::string str(const std::string& lambda_owner = "") const;

 private:
  bool bottom_ = false;
  long long constant_ = 0;
  std::map<Atom, long long, AtomLess> terms_;

  void add_term(const Atom& a, long long c);
};

// Pair of symbolic bounds [lo:hi]. Used both as a may-range of values and
// as a must-range of subscripts; either bound being ⊥ makes the whole
// range ⊥.
class SymRange {
 public:
  SymRange() : bottom_(true) {}
  SymRange(SymExpr lo, SymExpr hi);
  static SymRange bottom() { return SymRange(); }
  static SymRange point(SymExpr e);
  static SymRange lit(long long lo, long long hi);

  bool is_bottom() const { return bottom_; }
  const SymExpr& lo() const { return lo_; }
  const SymExpr& hi() const { return hi_; }
  bool is_point() const { return !bottom_ && lo_ == hi_; }

  static SymRange add(const SymRange& a, const SymRange& b);
  static SymRange sub(const SymRange& a, const SymRange& b);
  static SymRange scaled(const SymRange& a, long long c);
  static SymRange mul(const SymRange& a, const SymRange& b);  // ⊥ unless one side a literal point
  SymRange shifted(const SymExpr& e) const;

  bool operator==(const SymRange& o) const;

  SymRange substitute(const std::function<std::optional<SymExpr>(const Atom&)>& fn) const;
  // Replace an atom by a range, respecting coefficient signs per bound.
  SymRange substitute_range(const Atom& a, const SymRange& repl) const;

  std::string str(const std::string& lambda_owner = "") const;

 private:
  bool bottom_ = false;
  SymExpr lo_, hi_;
};

// Substitution helper: maps one named symbol kind to an expression.
std::function<std::optional<SymExpr>(const Atom&)> subst_one(Atom::Kind kind,
                                                             const std::string& name,
                                                             const SymExpr& repl);

}  // namespace idxpar

#include "idxpar/symexpr.hpp"

#include <sstream>

namespace idxpar {

// ---------------------------------------------------------------------------
// Atom

Atom Atom::big_lambda(std::string owner) { return {Kind::BigLambda, std::move(owner), nullptr}; }
Atom Atom::lambda(std::string owner) { return {Kind::Lambda, std::move(owner), nullptr}; }
Atom Atom::loop_index(std::string n) { return {Kind::LoopIndex, std::move(n), nullptr}; }
Atom Atom::var(std::string n) { return {Kind::Var, std::move(n), nullptr}; }

Atom Atom::array_elem(std::string array, SymExpr idx) {
  return {Kind::ArrayElem, std::move(array), std::make_shared<const SymExpr>(std::move(idx))};
}

Atom Atom::tri_sum(SymExpr n) {
  return {Kind::TriSum, "", std::make_shared<const SymExpr>(std::move(n))};
}

int Atom::cmp(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  bool ha = a.arg != nullptr, hb = b.arg != nullptr;
  if (ha != hb) return ha < hb ? -1 : 1;
  if (!ha) return 0;
  return SymExpr::cmp(*a.arg, *b.arg);
}

// ---------------------------------------------------------------------------
// SymExpr

SymExpr SymExpr::literal(long long v) {
  SymExpr e;
  e.constant_ = v;
  return e;
}

SymExpr SymExpr::bottom() {
  SymExpr e;
  e.bottom_ = true;
  return e;
}

SymExpr SymExpr::atom(Atom a) {
  if (a.arg != nullptr && a.arg->is_bottom()) return bottom();
  if (a.kind == Atom::Kind::TriSum) {
    if (auto n = a.arg->as_literal()) return literal(*n * (*n - 1) / 2);
  }
  SymExpr e;
  e.terms_[std::move(a)] = 1;
  return e;
}

SymExpr SymExpr::array_elem(std::string array, SymExpr idx) {
  if (idx.is_bottom()) return bottom();
  return atom(Atom::array_elem(std::move(array), std::move(idx)));
}

SymExpr SymExpr::tri_sum(SymExpr n) {
  if (n.is_bottom()) return bottom();
  return atom(Atom::tri_sum(std::move(n)));
}

std::optional<long long> SymExpr::as_literal() const {
  if (is_literal()) return constant_;
  return std::nullopt;
}

long long SymExpr::coeff(const Atom& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0 : it->second;
}

void SymExpr::add_term(const Atom& a, long long c) {
  if (c == 0) return;
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    terms_.emplace(a, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

SymExpr SymExpr::operator+(const SymExpr& o) const {
  if (bottom_ || o.bottom_) return bottom();
  SymExpr r = *this;
  r.constant_ += o.constant_;
  for (const auto& [a, c] : o.terms_) r.add_term(a, c);
  return r;
}

SymExpr SymExpr::operator-(const SymExpr& o) const { return *this + o.scaled(-1); }

SymExpr SymExpr::scaled(long long c) const {
  if (bottom_) return bottom();
  if (c == 0) return SymExpr();
  SymExpr r;
  r.constant_ = constant_ * c;
  for (const auto& [a, k] : terms_) r.terms_[a] = k * c;
  return r;
}

std::optional<SymExpr> SymExpr::mul(const SymExpr& a, const SymExpr& b) {
  if (a.is_bottom() || b.is_bottom()) return bottom();
  if (auto ca = a.as_literal()) return b.scaled(*ca);
  if (auto cb = b.as_literal()) return a.scaled(*cb);
  return std::nullopt;
}

int SymExpr::cmp(const SymExpr& a, const SymExpr& b) {
  if (a.bottom_ != b.bottom_) return a.bottom_ < b.bottom_ ? -1 : 1;
  if (a.bottom_) return 0;
  if (a.constant_ != b.constant_) return a.constant_ < b.constant_ ? -1 : 1;
  auto ia = a.terms_.begin(), ib = b.terms_.begin();
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    if (int c = Atom::cmp(ia->first, ib->first); c != 0) return c;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.terms_.end()) return 1;
  if (ib != b.terms_.end()) return -1;
  return 0;
}

bool SymExpr::contains(const std::function<bool(const Atom&)>& pred) const {
  for (const auto& [a, c] : terms_) {
    if (pred(a)) return true;
    if (a.arg != nullptr && a.arg->contains(pred)) return true;
  }
  return false;
}

SymExpr SymExpr::substitute(
    const std::function<std::optional<SymExpr>(const Atom&)>& fn) const {
  if (bottom_) return bottom();
  SymExpr r = literal(constant_);
  for (const auto& [a, c] : terms_) {
    std::optional<SymExpr> repl = fn(a);
    if (!repl && a.arg != nullptr) {
      SymExpr newArg = a.arg->substitute(fn);
      if (newArg != *a.arg) {
        Atom na = a;
        na.arg = std::make_shared<const SymExpr>(std::move(newArg));
        // re-canonicalize (TriSum with literal arg folds, bottom absorbs)
        repl = atom(std::move(na));
      }
    }
    SymExpr term = repl ? repl->scaled(c) : atom(a).scaled(c);
    r = r + term;
    if (r.is_bottom()) return r;
  }
  return r;
}

std::optional<long long> SymExpr::eval(const Valuation& v) const {
  if (bottom_) return std::nullopt;
  long long acc = constant_;
  for (const auto& [a, c] : terms_) {
    std::optional<long long> val;
    switch (a.kind) {
      case Atom::Kind::Var:
        val = v.var ? v.var(a.name) : std::nullopt;
        break;
      case Atom::Kind::LoopIndex:
        val = v.index ? v.index(a.name) : std::nullopt;
        break;
      case Atom::Kind::Lambda:
        val = v.lambda ? v.lambda(a.name) : std::nullopt;
        break;
      case Atom::Kind::BigLambda:
        val = v.big_lambda ? v.big_lambda(a.name) : std::nullopt;
        break;
      case Atom::Kind::ArrayElem: {
        auto idx = a.arg->eval(v);
        if (!idx || !v.array) return std::nullopt;
        val = v.array(a.name, *idx);
        break;
      }
      case Atom::Kind::TriSum: {
        auto n = a.arg->eval(v);
        if (!n) return std::nullopt;
        val = *n * (*n - 1) / 2;
        break;
      }
    }
    if (!val) return std::nullopt;
    acc += c * *val;
  }
  return acc;
}

namespace {
std::string atom_str(const Atom& a, const std::string& owner) {
  switch (a.kind) {
    case Atom::Kind::BigLambda:
      return (!owner.empty() && a.name == owner) ? "Λ" : "Λ(" + a.name + ")";
    case Atom::Kind::Lambda:
      return (!owner.empty() && a.name == owner) ? "λ" : "λ(" + a.name + ")";
    case Atom::Kind::LoopIndex:
    case Atom::Kind::Var:
      return a.name;
    case Atom::Kind::ArrayElem:
      return a.name + "[" + a.arg->str(owner) + "]";
    case Atom::Kind::TriSum: {
      std::string n = a.arg->str(owner);
      bool simple = a.arg->terms().size() == 1 && a.arg->constant() == 0;
      if (simple) return n + "*(" + n + "-1)/2";
      return "(" + n + ")*(" + n + "-1)/2";
    }
  }
  return "?";
}
}  // namespace

std::string SymExpr::str(const std::string& owner) const {
  if (bottom_) return "⊥";
  if (terms_.empty()) return std::to_string(constant_);
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : terms_) {
    long long k = c;
    if (first) {
      if (k < 0) {
        os << '-';
        k = -k;
      }
      first = false;
    } else {
      os << (k < 0 ? '-' : '+');
      if (k < 0) k = -k;
    }
    if (k != 1) os << k << '*';
    os << atom_str(a, owner);
  }
  if (constant_ > 0) os << '+' << constant_;
  if (constant_ < 0) os << constant_;
  return os.str();
}

// ---------------------------------------------------------------------------
// SymRange

SymRange::SymRange(SymExpr lo, SymExpr hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  bottom_ = lo_.is_bottom() || hi_.is_bottom();
  if (bottom_) {
    lo_ = SymExpr::bottom();
    hi_ = SymExpr::bottom();
  }
}

SymRange SymRange::point(SymExpr e) {
  SymExpr c = e;
  return SymRange(std::move(e), std::move(c));
}

SymRange SymRange::lit(long long lo, long long hi) {
  return SymRange(SymExpr::literal(lo), SymExpr::literal(hi));
}

SymRange SymRange::add(const SymRange& a, const SymRange& b) {
  if (a.bottom_ || b.bottom_) return bottom();
  return SymRange(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

SymRange SymRange::sub(const SymRange& a, const SymRange& b) {
  if (a.bottom_ || b.bottom_) return bottom();
  return SymRange(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

SymRange SymRange::scaled(const SymRange& a, long long c) {
  if (a.bottom_) return bottom();
  if (c >= 0) return SymRange(a.lo_.scaled(c), a.hi_.scaled(c));
  return SymRange(a.hi_.scaled(c), a.lo_.scaled(c));
}

SymRange SymRange::mul(const SymRange& a, const SymRange& b) {
  if (a.bottom_ || b.bottom_) return bottom();
  if (a.is_point()) {
    if (auto c = a.lo().as_literal()) return scaled(b, *c);
  }
  if (b.is_point()) {
    if (auto c = b.lo().as_literal()) return scaled(a, *c);
  }
  return bottom();
}

SymRange SymRange::shifted(const SymExpr& e) const {
  if (bottom_ || e.is_bottom()) return bottom();
  return SymRange(lo_ + e, hi_ + e);
}

bool SymRange::operator==(const SymRange& o) const {
  if (bottom_ != o.bottom_) return false;
  if (bottom_) return true;
  return lo_ == o.lo_ && hi_ == o.hi_;
}

SymRange SymRange::substitute(
    const std::function<std::optional<SymExpr>(const Atom&)>& fn) const {
  if (bottom_) return bottom();
  return SymRange(lo_.substitute(fn), hi_.substitute(fn));
}

SymRange SymRange::substitute_range(const Atom& a, const SymRange& repl) const {
  if (bottom_) return bottom();
  if (repl.is_bottom()) {
    if (lo_.coeff(a) != 0 || hi_.coeff(a) != 0 ||
        lo_.contains([&](const Atom& x) { return Atom::cmp(x, a) == 0; }) ||
        hi_.contains([&](const Atom& x) { return Atom::cmp(x, a) == 0; }))
      return bottom();
    return *this;
  }
  auto subst_bound = [&](const SymExpr& bound, bool is_lo) -> SymExpr {
    long long c = bound.coeff(a);
    // nested occurrence (inside another atom's argument): exact expr only
    if (bound.contains([&](const Atom& x) {
          return x.arg != nullptr && x.arg->contains([&](const Atom& y) {
            return Atom::cmp(y, a) == 0;
          });
        })) {
      if (repl.is_point())
        return bound.substitute(
            [&](const Atom& x) -> std::optional<SymExpr> {
              if (Atom::cmp(x, a) == 0) return repl.lo();
              return std::nullopt;
            });
      return SymExpr::bottom();
    }
    if (c == 0) return bound;
    const SymExpr& pick = ((c > 0) == is_lo) ? repl.lo() : repl.hi();
    SymExpr rest = bound + SymExpr::atom(a).scaled(-c);
    return rest + pick.scaled(c);
  };
  return SymRange(subst_bound(lo_, true), subst_bound(hi_, false));
}

std::string SymRange::str(const std::string& owner) const {
  if (bottom_) return "⊥";
  return "[" + lo_.str(owner) + ":" + hi_.str(owner) + "]";
}

std::function<std::optional<SymExpr>(const Atom&)> subst_one(Atom::Kind kind,
                                                             const std::string& name,
                                                             const SymExpr& repl) {
  return [kind, name, repl](const Atom& a) -> std::optional<SymExpr> {
    if (a.kind == kind && a.name == name) return repl;
    return std::nullopt;
  };
}

}  // namespace idxpar

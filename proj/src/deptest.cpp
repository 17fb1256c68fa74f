#include "idxpar/deptest.hpp"

#include <algorithm>
#include <functional>

#include "idxpar/subscript.hpp"

namespace idxpar {

namespace {

// ---------------------------------------------------------------------------
// Access collection: resolve scalar-mediated subscripts by substituting
// reaching definitions inside the candidate loop body, split on a
// first-iteration branch, and eliminate inner loop indexes.

struct CaseEnv {
  // scalar -> resolved expression, per case; absent means not written in
  // the body (loop-invariant symbol)
  std::map<std::string, SymExpr> first, rest;
  bool split = false;
};

class Collector {
 public:
  Collector(const Stmt& loop, const Program& prog, const SymRange& iter)
      : loop_(loop), prog_(prog), iter_(iter) {
    collect_written_scalars(loop.body);
    // scalars the body writes start undefined: a read before their first
    // definition carries a value across iterations
    for (const auto& n : written_scalars_) {
      env_.first[n] = SymExpr::bottom();
      env_.rest[n] = SymExpr::bottom();
    }
  }

  std::vector<AccessDescriptor> run() {
    walk_block(loop_.body);
    return std::move(out_);
  }

  const std::set<std::string>& written_scalars() const { return written_scalars_; }

 private:
  const Stmt& loop_;
  const Program& prog_;
  SymRange iter_;
  CaseEnv env_;
  std::vector<AccessDescriptor> out_;
  std::set<std::string> written_scalars_;
  struct Inner {
    std::string var;
    SymExpr lo_first, hi_first;  // inclusive bounds per case
    SymExpr lo_rest, hi_rest;
  };
  std::vector<Inner> inners_;
  int guard_depth_ = 0;
  std::set<std::string> branch_varying_;
  bool touched_branch_varying_ = false;

  void collect_written_scalars(const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          if (s->target.subscript == nullptr) written_scalars_.insert(s->target.name);
          break;
        case Stmt::Kind::If:
          collect_written_scalars(s->then_block);
          collect_written_scalars(s->else_block);
          break;
        case Stmt::Kind::For:
          written_scalars_.insert(s->index_var);
          collect_written_scalars(s->body);
          break;
      }
    }
  }

  bool is_index_name(const std::string& n) const {
    if (n == loop_.index_var) return true;
    for (const auto& in : inners_)
      if (in.var == n) return true;
    return false;
  }

  SymExpr resolve(const Expr& e, bool first_case) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return SymExpr::literal(e.value);
      case Expr::Kind::Ref: {
        if (e.subscripts.empty()) {
          if (is_index_name(e.name)) return SymExpr::loop_index(e.name);
          const auto& env = first_case ? env_.first : env_.rest;
          if (auto it = env.find(e.name); it != env.end()) {
            if (it->second.is_bottom() && branch_varying_.count(e.name))
              touched_branch_varying_ = true;
            return it->second;
          }
          return SymExpr::var(e.name);  // loop-invariant scalar or param
        }
        if (e.subscripts.size() != 1) return SymExpr::bottom();
        const ArrayDecl* d = prog_.array(e.name);
        if (d == nullptr || d->type != BaseType::Int) return SymExpr::bottom();
        return SymExpr::array_elem(e.name, resolve(*e.subscripts[0], first_case));
      }
      case Expr::Kind::Binary: {
        SymExpr l = resolve(*e.lhs, first_case);
        SymExpr r = resolve(*e.rhs, first_case);
        switch (e.op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': {
            auto m = SymExpr::mul(l, r);
            return m ? *m : SymExpr::bottom();
          }
        }
        return SymExpr::bottom();
      }
    }
    return SymExpr::bottom();
  }

  static bool contains_loop_index(const SymExpr& e, const std::string& n) {
    return e.contains(
        [&](const Atom& a) { return a.kind == Atom::Kind::LoopIndex && a.name == n; });
  }

  // Eliminate inner loop indexes from a subscript expression, producing
  // the per-candidate-iteration index range.
  std::pair<SymRange, bool> eliminate_inner(const SymExpr& sub, bool first_case) {
    bool via_atom = false;
    SymRange r = SymRange::point(sub);
    for (auto it = inners_.rbegin(); it != inners_.rend(); ++it) {
      const SymExpr& lo = first_case ? it->lo_first : it->lo_rest;
      const SymExpr& hi = first_case ? it->hi_first : it->hi_rest;
      if (!r.is_bottom()) {
        bool nested = r.lo().contains([&](const Atom& a) {
                        return a.arg != nullptr && contains_loop_index(*a.arg, it->var);
                      }) ||
                      r.hi().contains([&](const Atom& a) {
                        return a.arg != nullptr && contains_loop_index(*a.arg, it->var);
                      });
        if (nested) via_atom = true;
      }
      r = r.substitute_range(Atom::loop_index(it->var), SymRange(lo, hi));
    }
    return {r, via_atom};
  }

  void record_access(const std::string& array, bool is_write, const Expr& sub_expr, int line) {
    const ArrayDecl* d = prog_.array(array);
    if (d == nullptr || d->extents.size() != 1) return;  // rank-2 arrays are read-only inputs

    AccessDescriptor ad;
    ad.array = array;
    ad.is_write = is_write;
    ad.line = line;
    ad.guarded = guard_depth_ > 0;
    ad.direct = inners_.empty() && guard_depth_ == 0;
    touched_branch_varying_ = false;

    auto build_case = [&](bool first_case, BoundCase::Guard g) {
      SymExpr resolved = resolve(sub_expr, first_case);
      auto [range, via_atom] = eliminate_inner(resolved, first_case);
      if (via_atom) ad.inner_index_indirect = true;
      BoundCase bc;
      bc.guard = g;
      if (range.is_bottom()) {
        bc.lo = SymExpr::bottom();
        bc.hi = SymExpr::bottom();
      } else {
        bc.lo = range.lo();
        bc.hi = range.hi();
        if (first_case && !iter_.is_bottom()) {
          bc.lo = bc.lo.substitute(subst_one(Atom::Kind::LoopIndex, loop_.index_var, iter_.lo()));
          bc.hi = bc.hi.substitute(subst_one(Atom::Kind::LoopIndex, loop_.index_var, iter_.lo()));
        }
      }
      return bc;
    };

    if (env_.split) {
      ad.cases.push_back(build_case(true, BoundCase::Guard::FirstIter));
      ad.cases.push_back(build_case(false, BoundCase::Guard::Rest));
    } else {
      ad.cases.push_back(build_case(false, BoundCase::Guard::Uniform));
    }
    ad.branch_defined = touched_branch_varying_;

    // indirect shape, from the generic case
    SymExpr resolved = resolve(sub_expr, false);
    if (!resolved.is_bottom()) {
      const Atom* elem = nullptr;
      long long coeff = 0;
      bool extra_atoms = false;
      for (const auto& [a, c] : resolved.terms()) {
        if (a.kind == Atom::Kind::ArrayElem && elem == nullptr) {
          elem = &a;
          coeff = c;
        } else {
          extra_atoms = true;
        }
      }
      if (elem != nullptr) {
        IndirectSub ind;
        ind.base = elem->name;
        ind.index_expr = *elem->arg;
        ind.scale = coeff;
        ind.addend = extra_atoms ? SymExpr::bottom() : SymExpr::literal(resolved.constant());
        auto k = [&]() -> std::optional<long long> {
          SymExpr d = ind.index_expr - SymExpr::loop_index(loop_.index_var);
          return d.as_literal();
        }();
        ind.index_is_candidate_affine = k.has_value();
        ind.multi_level = elem->arg->contains(
            [](const Atom& a) { return a.kind == Atom::Kind::ArrayElem; });
        ad.indirect = std::move(ind);
      }
    }
    out_.push_back(std::move(ad));
  }

  void scan_expr_reads(const Expr& e, int line) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Ref:
        if (!e.subscripts.empty()) {
          if (e.subscripts.size() == 1) record_access(e.name, false, *e.subscripts[0], line);
          for (const auto& s : e.subscripts) scan_expr_reads(*s, line);
        }
        return;
      case Expr::Kind::Binary:
        scan_expr_reads(*e.lhs, line);
        scan_expr_reads(*e.rhs, line);
        return;
    }
  }

  // First-iteration branch: `i == lower`, or `i > lower` with the first
  // iteration in the else block.
  enum class GuardKind { None, FirstThen, FirstElse, Opaque };
  GuardKind recognize_guard(const Cond& c) {
    if (iter_.is_bottom()) return GuardKind::Opaque;
    if (c.lhs->kind != Expr::Kind::Ref || !c.lhs->subscripts.empty() ||
        c.lhs->name != loop_.index_var || !inners_.empty())
      return GuardKind::Opaque;
    SymExpr rhs = resolve(*c.rhs, false);
    if (rhs.is_bottom()) return GuardKind::Opaque;
    if (c.op == "==" && rhs == iter_.lo()) return GuardKind::FirstThen;
    if (c.op == ">" && rhs == iter_.lo()) return GuardKind::FirstElse;
    if (c.op == ">=" && rhs == iter_.lo() + 1) return GuardKind::FirstElse;
    return GuardKind::Opaque;
  }

  void walk_block(const std::vector<StmtPtr>& b) {
    for (const auto& s : b) walk_stmt(*s);
  }

  void walk_stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        scan_expr_reads(*s.rhs, s.line);
        if (s.target.subscript != nullptr) {
          scan_expr_reads(*s.target.subscript, s.line);
          record_access(s.target.name, true, *s.target.subscript, s.line);
          return;
        }
        env_.first[s.target.name] = resolve(*s.rhs, true);
        env_.rest[s.target.name] = resolve(*s.rhs, false);
        return;
      }
      case Stmt::Kind::If: {
        scan_expr_reads(*s.cond.lhs, s.line);
        scan_expr_reads(*s.cond.rhs, s.line);
        GuardKind g = recognize_guard(s.cond);
        if (g == GuardKind::FirstThen || g == GuardKind::FirstElse) {
          env_.split = true;
          const auto& first_block = g == GuardKind::FirstThen ? s.then_block : s.else_block;
          const auto& rest_block = g == GuardKind::FirstThen ? s.else_block : s.then_block;
          // each case follows its own branch
          walk_case_block(first_block, /*first_case=*/true);
          walk_case_block(rest_block, /*first_case=*/false);
          return;
        }
        // data-dependent branch: definitions that differ across the paths
        // become unresolvable
        ++guard_depth_;
        CaseEnv base = env_;
        walk_block(s.then_block);
        CaseEnv after_then = env_;
        env_ = base;
        walk_block(s.else_block);
        CaseEnv after_else = env_;
        --guard_depth_;
        env_ = base;
        auto merge = [varying = &branch_varying_](std::map<std::string, SymExpr>& dst,
                                                  const std::map<std::string, SymExpr>& a,
                                                  const std::map<std::string, SymExpr>& b) {
          std::set<std::string> keys;
          for (const auto& [k, v] : a) keys.insert(k);
          for (const auto& [k, v] : b) keys.insert(k);
          for (const auto& k : keys) {
            auto ia = a.find(k);
            auto ib = b.find(k);
            if (ia != a.end() && ib != b.end() && ia->second == ib->second) {
              dst[k] = ia->second;
            } else {
              dst[k] = SymExpr::bottom();
              varying->insert(k);
            }
          }
        };
        merge(env_.first, after_then.first, after_else.first);
        merge(env_.rest, after_then.rest, after_else.rest);
        return;
      }
      case Stmt::Kind::For: {
        scan_expr_reads(*s.lower, s.line);
        scan_expr_reads(*s.upper, s.line);
        Inner in;
        in.var = s.index_var;
        in.lo_first = resolve(*s.lower, true);
        in.hi_first = resolve(*s.upper, true) - 1;
        in.lo_rest = resolve(*s.lower, false);
        in.hi_rest = resolve(*s.upper, false) - 1;
        if (!iter_.is_bottom()) {
          auto fix = [&](SymExpr e) {
            return e.substitute(subst_one(Atom::Kind::LoopIndex, loop_.index_var, iter_.lo()));
          };
          in.lo_first = fix(in.lo_first);
          in.hi_first = fix(in.hi_first);
        }
        inners_.push_back(in);
        walk_block(s.body);
        inners_.pop_back();
        // after the loop the inner index and its body's scalar defs are
        // not tracked
        env_.first[s.index_var] = SymExpr::bottom();
        env_.rest[s.index_var] = SymExpr::bottom();
        std::set<std::string> defs;
        collect_written_scalars_of(s.body, defs);
        for (const auto& n : defs) {
          env_.first[n] = SymExpr::bottom();
          env_.rest[n] = SymExpr::bottom();
        }
        return;
      }
    }
  }

  // Walk one branch, updating only the named case's environment.
  void walk_case_block(const std::vector<StmtPtr>& b, bool first_case) {
    for (const auto& s : b) {
      switch (s->kind) {
        case Stmt::Kind::Assign: {
          scan_expr_reads(*s->rhs, s->line);
          if (s->target.subscript != nullptr) {
            scan_expr_reads(*s->target.subscript, s->line);
            record_access(s->target.name, true, *s->target.subscript, s->line);
            break;
          }
          auto& env = first_case ? env_.first : env_.rest;
          env[s->target.name] = resolve(*s->rhs, first_case);
          break;
        }
        default:
          // nested control flow inside a first-iteration branch is beyond
          // the resolved pattern; keep it sound
          walk_stmt(*s);
          break;
      }
    }
  }

  static void collect_written_scalars_of(const std::vector<StmtPtr>& b,
                                         std::set<std::string>& out) {
    for (const auto& s : b) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          if (s->target.subscript == nullptr) out.insert(s->target.name);
          break;
        case Stmt::Kind::If:
          collect_written_scalars_of(s->then_block, out);
          collect_written_scalars_of(s->else_block, out);
          break;
        case Stmt::Kind::For:
          out.insert(s->index_var);
          collect_written_scalars_of(s->body, out);
          break;
      }
    }
  }
};

ProofStep make_step(const std::string& query, const std::string& result,
                    std::vector<std::string> facts) {
  // dedupe fact citations, keep order
  std::vector<std::string> uniq;
  for (auto& f : facts)
    if (std::find(uniq.begin(), uniq.end(), f) == uniq.end()) uniq.push_back(f);
  return ProofStep{query, result, std::move(uniq)};
}

// ---------------------------------------------------------------------------
// Privatization: every scalar the body writes must be defined before any
// use on every path of one iteration.

void scalar_write_targets(const std::vector<StmtPtr>& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        if (s->target.subscript == nullptr) out.insert(s->target.name);
        break;
      case Stmt::Kind::If:
        scalar_write_targets(s->then_block, out);
        scalar_write_targets(s->else_block, out);
        break;
      case Stmt::Kind::For:
        out.insert(s->index_var);
        scalar_write_targets(s->body, out);
        break;
    }
  }
}

struct PrivCheck {
  const Stmt& loop;
  std::set<std::string> written;
  std::string violation;  // first offending scalar

  bool run() {
    scalar_write_targets(loop.body, written);
    std::set<std::string> defined;
    defined.insert(loop.index_var);
    walk(loop.body, defined);
    return violation.empty();
  }

  void check_reads(const Expr& e, const std::set<std::string>& defined) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Ref:
        if (e.subscripts.empty()) {
          if (written.count(e.name) && !defined.count(e.name) && violation.empty())
            violation = e.name;
        } else {
          for (const auto& s : e.subscripts) check_reads(*s, defined);
        }
        return;
      case Expr::Kind::Binary:
        check_reads(*e.lhs, defined);
        check_reads(*e.rhs, defined);
        return;
    }
  }

  void walk(const std::vector<StmtPtr>& b, std::set<std::string>& defined) {
    for (const auto& s : b) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          check_reads(*s->rhs, defined);
          if (s->target.subscript) check_reads(*s->target.subscript, defined);
          if (s->target.subscript == nullptr) defined.insert(s->target.name);
          break;
        case Stmt::Kind::If: {
          check_reads(*s->cond.lhs, defined);
          check_reads(*s->cond.rhs, defined);
          std::set<std::string> d1 = defined, d2 = defined;
          walk(s->then_block, d1);
          walk(s->else_block, d2);
          std::set<std::string> meet;
          std::set_intersection(d1.begin(), d1.end(), d2.begin(), d2.end(),
                                std::inserter(meet, meet.begin()));
          defined = std::move(meet);
          break;
        }
        case Stmt::Kind::For: {
          check_reads(*s->lower, defined);
          check_reads(*s->upper, defined);
          defined.insert(s->index_var);
          std::set<std::string> inner = defined;
          walk(s->body, inner);
          // body may run zero times: its definitions are not definite
          break;
        }
      }
    }
  }
};

}  // namespace

std::vector<AccessDescriptor> collect_accesses(const Stmt& loop, const Program& prog,
                                               const SymRange& iter_range) {
  Collector c(loop, prog, iter_range);
  return c.run();
}

TestOutcome test_monotonic_ranges(const AccessDescriptor& d, const std::string& index,
                                  const SymRange& iter_range, const Assumptions& asms) {
  TestOutcome out;
  const BoundCase* generic = nullptr;
  const BoundCase* first = nullptr;
  for (const auto& c : d.cases) {
    if (c.guard == BoundCase::Guard::FirstIter) first = &c;
    else generic = &c;
  }
  if (generic == nullptr || !generic->resolved()) {
    out.reason = "unresolved per-iteration bounds for '" + d.array + "'";
    if (d.branch_defined)
      out.reason += " (subscript chosen by a data-dependent branch – no inference rule for "
                    "disjoint injective expressions)";
    return out;
  }
  bool split = first != nullptr;
  if (split && iter_range.is_bottom()) {
    out.reason = "first-iteration case with unknown loop bounds";
    return out;
  }

  Assumptions dom = asms;
  if (!iter_range.is_bottom()) {
    // adjacent pair (i, i+1): both iterations inside the loop
    SymExpr lo_dom = split ? iter_range.lo() + 1 : iter_range.lo();
    dom.index_domains[index] = SymRange(lo_dom, iter_range.hi() - 1);
  }
  auto shift = [&](const SymExpr& e) {
    return e.substitute(subst_one(Atom::Kind::LoopIndex, index,
                                  SymExpr::loop_index(index) + 1));
  };
  SymExpr lo_next = shift(generic->lo);

  std::vector<std::string> used1;
  bool q1 = prove_lt(generic->hi, lo_next, dom, &used1);
  out.steps.push_back(make_step(
      "hi(" + index + ") < lo(" + index + "+1):  " + generic->hi.str() + " < " + lo_next.str(),
      q1 ? "ProvablyLT" : "Unknown", used1));
  if (!q1) {
    out.reason = "could not prove " + generic->hi.str() + " < " + lo_next.str() +
                 " for adjacent iterations of '" + d.array + "'";
    return out;
  }
  std::vector<std::string> used2;
  bool q2 = prove_le(generic->lo, lo_next, dom, &used2);
  out.steps.push_back(make_step(
      "lo(" + index + ") <= lo(" + index + "+1):  " + generic->lo.str() + " <= " + lo_next.str(),
      q2 ? "ProvablyLE" : "Unknown", used2));
  if (!q2) {
    out.reason = "could not prove the range lower bounds non-decreasing for '" + d.array + "'";
    return out;
  }

  if (split) {
    // first iteration: prove its range empty, or entirely below the rest
    std::vector<std::string> used3;
    bool empty = prove_lt(first->resolved() ? first->hi : SymExpr::bottom(), first->lo, asms,
                          &used3);
    if (empty) {
      out.steps.push_back(make_step("first iteration range empty:  " + first->hi.str() + " < " +
                                        first->lo.str(),
                                    "ProvablyLT", used3));
    } else if (first->resolved()) {
      SymExpr lo_second = generic->lo.substitute(
          subst_one(Atom::Kind::LoopIndex, index, iter_range.lo() + 1));
      std::vector<std::string> used4;
      bool below = prove_lt(first->hi, lo_second, asms, &used4);
      if (below) {
        out.steps.push_back(make_step(
            "first range below the second:  " + first->hi.str() + " < " + lo_second.str(),
            "ProvablyLT", used4));
      } else {
        out.peeled = true;
        out.steps.push_back(make_step("first iteration not comparable; peeled", "Peeled", {}));
      }
    } else {
      out.peeled = true;
      out.steps.push_back(make_step("first iteration unresolved; peeled", "Peeled", {}));
    }
  }
  out.proved = true;
  return out;
}

TestOutcome test_injective_write(const AccessDescriptor& d, const std::string& index,
                                 const SymRange& iter_range, const Assumptions& asms) {
  TestOutcome out;
  if (!d.indirect.has_value()) {
    out.reason = "subscript of '" + d.array + "' is not an index-array read";
    return out;
  }
  const IndirectSub& ind = *d.indirect;
  if (ind.addend.is_bottom() || !ind.addend.is_literal()) {
    out.reason = "subscript of '" + d.array +
                 "' combines several expressions – no inference rule for disjoint injective "
                 "expressions";
    return out;
  }
  if (ind.multi_level) {
    out.reason = "multi-level indirection (a[b[c[i]]]) – no inference rule for simultaneous "
                 "properties";
    return out;
  }
  if (!ind.index_is_candidate_affine) {
    out.reason = "index array '" + ind.base +
                 "' is subscripted by an inner loop variable – no inference rule for "
                 "simultaneous monotonicity/injectivity across loop levels";
    return out;
  }
  if (ind.scale == 0) {
    out.reason = "subscript does not depend on the index array read";
    return out;
  }
  if (iter_range.is_bottom()) {
    out.reason = "unknown candidate loop bounds";
    return out;
  }
  SymExpr k = ind.index_expr - SymExpr::loop_index(index);
  SymRange accessed(iter_range.lo() + k, iter_range.hi() + k);

  if (asms.facts != nullptr) {
    for (const FactEntry* f : asms.facts->for_array(ind.base)) {
      if (!f->is_property) continue;
      if (f->property != ArrayProperty::Injective && f->property != ArrayProperty::Identity)
        continue;
      std::vector<std::string> used;
      if (range_covered(accessed, f->index_range, asms, &used)) {
        used.push_back(f->str());
        out.steps.push_back(make_step("injectivity of " + ind.base + " covers " + accessed.str(),
                                      "Proved", used));
        out.proved = true;
        return out;
      }
    }
  }
  out.reason = "no injectivity fact on '" + ind.base + "' covers " + accessed.str();
  if (d.guarded)
    out.reason += " – guarded writes need the subset property, which is not inferred";
  return out;
}

Verdict classify_loop(const Stmt& loop, const Program& prog, const LoopRecord& rec) {
  Verdict v;
  v.loop_id = rec.id;
  v.line = rec.line;
  Assumptions asms = base_assumptions(prog, &rec.facts_at_entry);
  if (!rec.iter_range.is_bottom())
    asms.index_domains[loop.index_var] = rec.iter_range;

  // scalars first: every written scalar must be privatizable
  PrivCheck priv{loop};
  if (!priv.run()) {
    v.decision = Decision::Unknown;
    v.reason = "scalar '" + priv.violation + "' may carry a value across iterations";
    return v;
  }
  for (const auto& n : priv.written)
    if (n != loop.index_var) v.private_scalars.push_back(n);
  std::sort(v.private_scalars.begin(), v.private_scalars.end());

  std::vector<AccessDescriptor> accesses = collect_accesses(loop, prog, rec.iter_range);

  bool used_monotonic = false, used_injective = false, peeled = false;
  std::vector<std::string> reasons;

  std::vector<const AccessDescriptor*> proved_writes;
  for (const auto& d : accesses) {
    if (!d.is_write) continue;

    // a provably loop-invariant single location written every iteration is
    // a demonstrated output conflict
    bool degenerate_invariant =
        d.direct && d.cases.size() == 1 && d.cases[0].resolved() &&
        d.cases[0].lo == d.cases[0].hi &&
        !d.cases[0].lo.contains([&](const Atom& a) {
          return a.kind == Atom::Kind::LoopIndex && a.name == loop.index_var;
        });
    if (degenerate_invariant && !rec.trip.is_bottom() &&
        prove_le(SymExpr::literal(2), rec.trip, asms)) {
      v.decision = Decision::Serial;
      v.rule = DepRule::None;
      v.witness = SerialWitness{0, 1, d.array, d.cases[0].lo.str()};
      v.reason = "iterations 0 and 1 write " + d.array + "[" + d.cases[0].lo.str() + "]";
      return v;
    }

    bool degenerate_indirect = d.indirect.has_value() && d.cases.size() == 1 &&
                               d.cases[0].lo == d.cases[0].hi;
    TestOutcome first_try, second_try;
    if (degenerate_indirect) {
      first_try = test_injective_write(d, loop.index_var, rec.iter_range, asms);
      if (!first_try.proved)
        second_try = test_monotonic_ranges(d, loop.index_var, rec.iter_range, asms);
    } else {
      first_try = test_monotonic_ranges(d, loop.index_var, rec.iter_range, asms);
      if (!first_try.proved)
        second_try = test_injective_write(d, loop.index_var, rec.iter_range, asms);
    }
    const TestOutcome& ok = first_try.proved ? first_try : second_try;
    for (const auto& s : first_try.steps) v.proof.push_back(s);
    for (const auto& s : second_try.steps) v.proof.push_back(s);
    if (!ok.proved) {
      if (!first_try.reason.empty()) reasons.push_back(first_try.reason);
      if (!second_try.reason.empty()) reasons.push_back(second_try.reason);
      continue;
    }
    bool by_injective = (degenerate_indirect && first_try.proved) ||
                        (!degenerate_indirect && !first_try.proved);
    (by_injective ? used_injective : used_monotonic) = true;
    peeled = peeled || ok.peeled;
    proved_writes.push_back(&d);
  }

  size_t write_count = 0, proven = proved_writes.size();
  for (const auto& d : accesses)
    if (d.is_write) ++write_count;

  if (write_count != proven) {
    v.decision = Decision::Unknown;
    std::string r;
    for (size_t i = 0; i < reasons.size(); ++i) {
      if (i) r += "; ";
      r += reasons[i];
    }
    v.reason = r.empty() ? "write accesses not proven independent" : r;
    return v;
  }

  // reads of a written array are only allowed at ranges proven private,
  // i.e. equal to a proven write range of the same array
  for (const auto& d : accesses) {
    if (d.is_write) continue;
    bool written_here = false;
    for (const auto* w : proved_writes) written_here |= w->array == d.array;
    if (!written_here) continue;  // distinct arrays: no output dependence question
    bool matched = false;
    for (const auto* w : proved_writes) {
      if (w->array != d.array || w->cases.size() != d.cases.size()) continue;
      bool eq = true;
      for (size_t i = 0; i < d.cases.size(); ++i) {
        eq = eq && d.cases[i].resolved() && w->cases[i].resolved() &&
             d.cases[i].lo == w->cases[i].lo && d.cases[i].hi == w->cases[i].hi;
      }
      if (eq) {
        matched = true;
        break;
      }
    }
    if (!matched) {
      v.decision = Decision::Unknown;
      v.reason = "'" + d.array + "' is read at line " + std::to_string(d.line) +
                 " at a range not proven private to the iteration";
      return v;
    }
  }

  v.decision = Decision::Parallel;
  v.rule = used_monotonic ? DepRule::MonotonicRanges
                          : (used_injective ? DepRule::InjectiveWrite : DepRule::None);
  v.peeled_first_iteration = peeled;
  return v;
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Parallel: return "parallel";
    case Decision::Serial: return "serial";
    case Decision::Unknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(DepRule r) {
  switch (r) {
    case DepRule::None: return "None";
    case DepRule::InjectiveWrite: return "InjectiveWrite";
    case DepRule::MonotonicRanges: return "MonotonicRanges";
  }
  return "None";
}

}  // namespace idxpar

#include "idxpar/phase2.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "idxpar/subscript.hpp"

namespace idxpar {

namespace {

bool contains_any_lambda(const SymExpr& e) {
  return e.contains([](const Atom& a) {
    return a.kind == Atom::Kind::Lambda || a.kind == Atom::Kind::BigLambda;
  });
}

bool contains_index(const SymExpr& e, const std::string& idx) {
  return e.contains(
      [&](const Atom& a) { return a.kind == Atom::Kind::LoopIndex && a.name == idx; });
}

bool contains_array(const SymExpr& e, const std::string& arr) {
  return e.contains(
      [&](const Atom& a) { return a.kind == Atom::Kind::ArrayElem && a.name == arr; });
}

struct AggBound {
  SymExpr expr;
  bool needs_nonempty = false;  // sound only when the loop runs at least once
};

// Closed form of one bound across the iteration space.
std::optional<AggBound> aggregate_bound(const SymExpr& bound, const std::string& name,
                                        const std::string& index, const SymExpr& trip,
                                        const SymExpr& iter_lo) {
  if (bound.is_bottom()) return std::nullopt;
  Atom self = Atom::lambda(name);
  long long self_coeff = bound.coeff(self);
  bool has_idx = contains_index(bound, index);

  if (self_coeff == 0 && !has_idx && !contains_any_lambda(bound)) {
    // loop-invariant bound: unchanged, but only if an iteration happened
    return AggBound{bound, true};
  }
  if (trip.is_bottom()) return std::nullopt;

  if (self_coeff == 1 && bound.terms().size() == 1 && !has_idx) {
    // λ + k  →  Λ + n*k
    long long k = bound.constant();
    return AggBound{SymExpr::big_lambda(name) + trip.scaled(k), false};
  }
  if (self_coeff == 1 && bound.terms().size() == 2 && bound.constant() == 0 &&
      bound.coeff(Atom::loop_index(index)) == 1 && iter_lo.as_literal() == 0) {
    // λ + i over iterations 0..n-1  →  Λ + n(n-1)/2
    return AggBound{SymExpr::big_lambda(name) + SymExpr::tri_sum(trip), false};
  }
  return std::nullopt;
}

void merge_write_range(std::map<std::string, std::optional<SymRange>>& ws,
                       const std::string& arr, const std::optional<SymRange>& r,
                       const Assumptions& asms) {
  auto it = ws.find(arr);
  if (it == ws.end()) {
    ws[arr] = r;
    return;
  }
  if (!it->second.has_value() || !r.has_value()) {
    it->second = std::nullopt;
    return;
  }
  SymRange u = range_union(*it->second, *r, asms);
  it->second = u.is_bottom() ? std::nullopt : std::optional<SymRange>(u);
}

// Scalars that only count unanalyzable indirections: written in the body,
// read inside the subscript of a non-simple array write, and never read
// anywhere else except their own update. Their effect is already reported
// through the array's ⊥.
class CounterScan {
 public:
  explicit CounterScan(const std::string& index) { index_stack_.push_back(index); }

  void block(const std::vector<StmtPtr>& stmts) {
    for (const auto& s : stmts) stmt(*s);
  }

  std::set<std::string> result() const {
    std::set<std::string> out;
    for (const auto& n : written_) {
      if (counter_use_.count(n) && !normal_use_.count(n)) out.insert(n);
    }
    return out;
  }

 private:
  std::vector<std::string> index_stack_;
  std::set<std::string> written_, counter_use_, normal_use_;

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        written_.insert(s.target.name);
        bool self_update = s.target.subscript == nullptr && reads_only_self(*s.rhs, s.target.name);
        if (!self_update) uses(*s.rhs, false);
        if (s.target.subscript != nullptr) {
          bool simple = classify_subscript(*s.target.subscript, index_stack_.back()).has_value();
          uses(*s.target.subscript, !simple);
        }
        return;
      }
      case Stmt::Kind::If:
        uses(*s.cond.lhs, false);
        uses(*s.cond.rhs, false);
        block(s.then_block);
        block(s.else_block);
        return;
      case Stmt::Kind::For:
        uses(*s.lower, false);
        uses(*s.upper, false);
        index_stack_.push_back(s.index_var);
        block(s.body);
        index_stack_.pop_back();
        return;
    }
  }

  static bool reads_only_self(const Expr& e, const std::string& name) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return true;
      case Expr::Kind::Ref:
        return e.subscripts.empty() && e.name == name;
      case Expr::Kind::Binary:
        return reads_only_self(*e.lhs, name) && reads_only_self(*e.rhs, name);
    }
    return false;
  }

  void uses(const Expr& e, bool counter_ctx) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Ref:
        if (e.subscripts.empty()) {
          (counter_ctx ? counter_use_ : normal_use_).insert(e.name);
        } else {
          for (const auto& sub : e.subscripts) uses(*sub, counter_ctx);
        }
        return;
      case Expr::Kind::Binary:
        uses(*e.lhs, counter_ctx);
        uses(*e.rhs, counter_ctx);
        return;
    }
  }
};

void collect_written_arrays(const std::vector<StmtPtr>& stmts, std::set<std::string>& out) {
  for (const auto& s : stmts) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        if (s->target.subscript != nullptr) out.insert(s->target.name);
        break;
      case Stmt::Kind::If:
        collect_written_arrays(s->then_block, out);
        collect_written_arrays(s->else_block, out);
        break;
      case Stmt::Kind::For:
        collect_written_arrays(s->body, out);
        break;
    }
  }
}

}  // namespace

Assumptions base_assumptions(const Program& prog, const ProgramFacts* facts) {
  Assumptions a;
  a.facts = facts;
  for (const auto& p : prog.params) a.positive_params.insert(p);
  return a;
}

std::set<std::string> nest_written_arrays(const Stmt& loop) {
  std::set<std::string> out;
  collect_written_arrays(loop.body, out);
  return out;
}

std::optional<RecurrenceView> detect_recurrence(const std::string& array, long long offset,
                                                const SymRange& value,
                                                const std::string& index) {
  if (value.is_bottom() || index.empty()) return std::nullopt;
  SymExpr prior_idx = SymExpr::loop_index(index) + (offset - 1);
  Atom prior = Atom::array_elem(array, prior_idx);
  if (value.lo().coeff(prior) != 1 || value.hi().coeff(prior) != 1) return std::nullopt;
  SymExpr alo = value.lo() - SymExpr::atom(prior);
  SymExpr ahi = value.hi() - SymExpr::atom(prior);
  if (contains_array(alo, array) || contains_array(ahi, array)) return std::nullopt;
  if (contains_any_lambda(alo) || contains_any_lambda(ahi)) return std::nullopt;
  return RecurrenceView{prior_idx, SymRange(alo, ahi)};
}

LoopRecord aggregate(const Stmt& loop, BodySummary body, const SymRange& iter_range,
                     const SymExpr& trip, const Assumptions& asms) {
  LoopRecord rec;
  rec.id = loop.loop_id();
  rec.line = loop.line;
  rec.index_var = loop.index_var;
  rec.iter_range = iter_range;
  rec.trip = trip;

  bool nonempty_proven =
      !trip.is_bottom() && prove_le(SymExpr::literal(1), trip, asms);

  // scalars
  for (const auto& [name, exit] : body.scalar_exit) {
    SymRange eff = SymRange::bottom();
    if (!exit.is_bottom()) {
      auto lo = aggregate_bound(exit.lo(), name, loop.index_var, trip, iter_range.lo());
      auto hi = aggregate_bound(exit.hi(), name, loop.index_var, trip, iter_range.lo());
      if (lo && hi) {
        bool needs = lo->needs_nonempty || hi->needs_nonempty;
        if (!needs || nonempty_proven) eff = SymRange(lo->expr, hi->expr);
      }
    }
    rec.scalar_effects[name] = eff;
  }

  // arrays
  for (const auto& [arr, writes] : body.array_writes) {
    if (body.poisoned(arr)) continue;  // handled below
    bool sole_write = writes.size() == 1;
    for (const auto& w : writes) {
      if (w.sub.kind == WriteSub::Kind::Simple) {
        SymRange written = iter_range.is_bottom()
                               ? SymRange::bottom()
                               : SymRange(iter_range.lo() + w.sub.offset,
                                          iter_range.hi() + w.sub.offset);
        merge_write_range(rec.write_set, arr, written.is_bottom()
                                                   ? std::nullopt
                                                   : std::optional<SymRange>(written),
                          asms);
        if (written.is_bottom() || w.value.is_bottom()) continue;
        bool range_ok = prove_le(written.lo(), written.hi(), asms);
        if (!range_ok) continue;  // unprovably-ordered must-range: no fact

        bool invariant = !contains_any_lambda(w.value.lo()) &&
                         !contains_any_lambda(w.value.hi()) &&
                         !contains_index(w.value.lo(), loop.index_var) &&
                         !contains_index(w.value.hi(), loop.index_var);
        if (invariant && !w.conditional && nonempty_proven) {
          FactEntry f = FactEntry::value_range(arr, written, w.value);
          f.origin = rec.id;
          f.rule = "loop-invariant value";
          rec.facts.push_back(std::move(f));
          continue;
        }
        if (auto rv = detect_recurrence(arr, w.sub.offset, w.value, loop.index_var);
            rv && sole_write && !w.conditional) {
          SignFact sf = sign_of_range(rv->addend, asms);
          std::optional<ArrayProperty> prop;
          if (sf == SignFact::StrictlyPositive) prop = ArrayProperty::StrictMonotonicInc;
          else if (sf == SignFact::NonNegative) prop = ArrayProperty::MonotonicInc;
          else if (sf == SignFact::StrictlyNegative) prop = ArrayProperty::StrictMonotonicDec;
          else if (sf == SignFact::NonPositive) prop = ArrayProperty::MonotonicDec;
          if (prop) {
            FactEntry f = FactEntry::prop(arr, written, *prop);
            f.origin = rec.id;
            f.rule = "recurrence";
            rec.facts.push_back(f);
            if (*prop == ArrayProperty::StrictMonotonicInc ||
                *prop == ArrayProperty::StrictMonotonicDec) {
              // strict monotonicity implies injectivity over the full span
              FactEntry inj = FactEntry::prop(
                  arr, SymRange(written.lo() - 1, written.hi()), ArrayProperty::Injective);
              inj.origin = rec.id;
              inj.rule = "strict monotonicity implies injectivity";
              inj.derived = true;
              rec.facts.push_back(std::move(inj));
            }
            continue;
          }
          continue;  // recurrence with undecidable sign: no fact
        }
        if (w.sub.offset == 0 && !w.conditional &&
            w.value == SymRange::point(SymExpr::loop_index(loop.index_var))) {
          FactEntry f = FactEntry::prop(arr, written, ArrayProperty::Identity);
          f.origin = rec.id;
          f.rule = "identity";
          rec.facts.push_back(std::move(f));
          continue;
        }
        continue;  // no aggregation rule applies: ⊥ for this array
      }
      if (w.sub.kind == WriteSub::Kind::Range) {
        SymRange r = w.sub.range;
        bool varies = r.is_bottom() || contains_index(r.lo(), loop.index_var) ||
                      contains_index(r.hi(), loop.index_var);
        if (varies) {
          // widen over the iteration space for the kill set only
          std::optional<SymRange> widened;
          if (!r.is_bottom() && !iter_range.is_bottom()) {
            SymRange wdn = r.substitute_range(Atom::loop_index(loop.index_var), iter_range);
            if (!wdn.is_bottom()) widened = wdn;
          }
          merge_write_range(rec.write_set, arr, widened, asms);
          continue;
        }
        merge_write_range(rec.write_set, arr, r, asms);
        bool invariant = !w.value.is_bottom() && !contains_any_lambda(w.value.lo()) &&
                         !contains_any_lambda(w.value.hi()) &&
                         !contains_index(w.value.lo(), loop.index_var) &&
                         !contains_index(w.value.hi(), loop.index_var);
        if (invariant && !w.conditional && nonempty_proven &&
            prove_le(r.lo(), r.hi(), asms)) {
          FactEntry f = FactEntry::value_range(arr, r, w.value);
          f.origin = rec.id;
          f.rule = "loop-invariant value";
          rec.facts.push_back(std::move(f));
        }
        continue;
      }
    }
  }
  for (const auto& arr : body.poisoned_here) rec.write_set[arr] = std::nullopt;
  for (const auto& arr : body.poisoned_inherited) rec.write_set[arr] = std::nullopt;

  // scalars that only drive unanalyzable subscripts stay out of the trace
  CounterScan scan(loop.index_var);
  scan.block(loop.body);
  for (const auto& n : scan.result()) body.hidden_scalars.insert(n);

  rec.body = std::move(body);
  return rec;
}

LoopRecord analyze_loop(const Stmt& loop, BodyCtx& encl) {
  SymRange lo_ev = eval_expr(*loop.lower, encl);
  SymRange up_ev = eval_expr(*loop.upper, encl);
  SymExpr lo = lo_ev.is_point() ? lo_ev.lo() : SymExpr::bottom();
  SymExpr up = up_ev.is_point() ? up_ev.lo() : SymExpr::bottom();
  SymRange iter = (lo.is_bottom() || up.is_bottom()) ? SymRange::bottom()
                                                     : SymRange(lo, up - 1);
  SymExpr trip = (lo.is_bottom() || up.is_bottom()) ? SymExpr::bottom() : up - lo;

  BodyCtx inner;
  inner.prog = encl.prog;
  inner.facts = encl.facts;
  inner.store = nullptr;
  inner.asms = encl.asms;
  inner.index = loop.index_var;
  inner.outer_indexes = encl.outer_indexes;
  if (!encl.index.empty()) inner.outer_indexes.insert(encl.index);
  inner.zero_init_scalars = false;
  inner.records = encl.records;
  if (!iter.is_bottom()) inner.asms.index_domains[loop.index_var] = iter;

  BodySummary body = analyze_body(loop, inner);
  LoopRecord rec = aggregate(loop, std::move(body), iter, trip, inner.asms);
  if (encl.facts != nullptr) rec.facts_at_entry = *encl.facts;
  return rec;
}

void collapse(const LoopRecord& rec, ProgramFacts& facts,
              std::map<std::string, SymRange>& top_scalars, const Assumptions& asms) {
  for (const auto& [arr, wr] : rec.write_set) {
    if (wr.has_value())
      facts.kill_overlapping(arr, *wr, asms);
    else
      facts.kill_array(arr);
  }
  for (const auto& f : rec.facts) facts.add(f);
  for (const auto& [name, eff] : rec.scalar_effects) {
    SymRange incoming = SymRange::lit(0, 0);
    if (auto it = top_scalars.find(name); it != top_scalars.end()) incoming = it->second;
    top_scalars[name] = eff.is_bottom()
                            ? SymRange::bottom()
                            : eff.substitute_range(Atom::big_lambda(name), incoming);
  }
}

PipelineResult run_pipeline(const Program& prog) {
  PipelineResult res;
  BodyCtx top;
  top.prog = &prog;
  top.facts = std::shared_ptr<const ProgramFacts>(&res.facts, [](const ProgramFacts*) {});
  top.store = &res.facts;
  top.asms = base_assumptions(prog, &res.facts);
  top.zero_init_scalars = true;
  top.records = &res.loops;

  for (const auto& s : prog.stmts) interpret_top_stmt(*s, top);
  res.top_scalars = top.scalars;
  return res;
}

// ---------------------------------------------------------------------------
// Trace rendering

namespace {

std::string render_write_value(const std::string& arr, const ArrayWrite& w,
                               const std::string& index) {
  if (w.sub.kind == WriteSub::Kind::Simple) {
    if (auto rv = detect_recurrence(arr, w.sub.offset, w.value, index))
      return arr + "[" + rv->prior_elem.str() + "]+" + rv->addend.str();
  }
  return w.value.str();
}

}  // namespace

std::string render_trace(const PipelineResult& res) {
  std::ostringstream os;
  for (const LoopRecord& rec : res.loops) {
    std::vector<std::string> p1, p2;
    for (const auto& [name, exit] : rec.body.scalar_exit) {
      if (rec.body.hidden_scalars.count(name)) continue;
      p1.push_back(name + ": " + exit.str(name));
      SymRange eff = SymRange::bottom();
      if (auto it = rec.scalar_effects.find(name); it != rec.scalar_effects.end())
        eff = it->second;
      p2.push_back(name + ": " + eff.str(name));
    }
    std::set<std::string> arrays;
    for (const auto& [arr, ws] : rec.body.array_writes) arrays.insert(arr);
    for (const auto& arr : rec.body.poisoned_here) arrays.insert(arr);
    for (const auto& arr : arrays) {
      if (rec.body.poisoned_here.count(arr)) {
        p1.push_back(arr + ": ⊥");
        p2.push_back(arr + ": ⊥");
        continue;
      }
      auto it = rec.body.array_writes.find(arr);
      for (const auto& w : it->second) {
        if (w.sub.kind == WriteSub::Kind::Simple) {
          SymExpr sub = SymExpr::loop_index(rec.index_var) + w.sub.offset;
          p1.push_back(arr + ": [" + sub.str() + "], " +
                       render_write_value(arr, w, rec.index_var));
        } else if (w.sub.kind == WriteSub::Kind::Range) {
          p1.push_back(arr + ": " + w.sub.range.str() + ", " + w.value.str());
        }
      }
      bool any_fact = false;
      for (const auto& f : rec.facts) {
        if (f.array == arr && !f.derived) {
          p2.push_back(f.str());
          any_fact = true;
        }
      }
      if (!any_fact) p2.push_back(arr + ": ⊥");
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += "; ";
        s += v[i];
      }
      return s.empty() ? "(no effects)" : s;
    };
    os << "Phase 1 (" << rec.line << "): " << join(p1) << "\n";
    os << "Phase 2 (" << rec.line << "): " << join(p2) << "\n";
  }
  return os.str();
}

}  // namespace idxpar

#include "idxpar/phase1.hpp"

#include "idxpar/phase2.hpp"
#include "idxpar/subscript.hpp"

namespace idxpar {

namespace {

bool is_analyzable_array(const Program& prog, const std::string& name) {
  const ArrayDecl* a = prog.array(name);
  return a != nullptr && a->type == BaseType::Int && a->extents.size() == 1;
}

// Widen a subscript's range over the in-scope loop index domains, so a
// fact over [0:N-1] covers the read rowsize[i-1] under i ∈ [1:N].
SymRange widen_over_domains(const SymRange& r, const Assumptions& asms) {
  SymRange w = r;
  for (const auto& [iname, dom] : asms.index_domains)
    w = w.substitute_range(Atom::loop_index(iname), dom);
  return w;
}

void exec_stmt(const Stmt& s, BodyCtx& ctx);

void exec_block(const std::vector<StmtPtr>& block, BodyCtx& ctx) {
  for (const auto& s : block) exec_stmt(*s, ctx);
}

SymRange entry_value_at(BodyCtx& ctx, const std::string& array, long long offset) {
  if (ctx.index.empty()) return SymRange::bottom();
  // the element's value before this iteration wrote it
  SymExpr idx = SymExpr::loop_index(ctx.index) + offset;
  return SymRange::point(SymExpr::array_elem(array, std::move(idx)));
}

void merge_branches(BodyCtx& ctx, BodyCtx& a, BodyCtx& b) {
  // scalars
  std::set<std::string> names;
  for (const auto& [n, v] : a.scalars) names.insert(n);
  for (const auto& [n, v] : b.scalars) names.insert(n);
  for (const auto& n : names) {
    SymRange va = a.scalar_value(n);
    SymRange vb = b.scalar_value(n);
    ctx.scalars[n] = range_union(va, vb, ctx.asms);
  }
  for (const auto& n : a.written_scalars) ctx.written_scalars.insert(n);
  for (const auto& n : b.written_scalars) ctx.written_scalars.insert(n);

  // simple array writes: a location written on one path only may keep its
  // entry value, so the merged range must include it
  std::set<std::string> arrays;
  for (const auto& [n, m] : a.simple_writes) arrays.insert(n);
  for (const auto& [n, m] : b.simple_writes) arrays.insert(n);
  for (const auto& arr : arrays) {
    std::set<long long> offs;
    if (auto it = a.simple_writes.find(arr); it != a.simple_writes.end())
      for (const auto& [k, w] : it->second) offs.insert(k);
    if (auto it = b.simple_writes.find(arr); it != b.simple_writes.end())
      for (const auto& [k, w] : it->second) offs.insert(k);
    for (long long k : offs) {
      const ArrayWrite* wa = nullptr;
      const ArrayWrite* wb = nullptr;
      if (auto it = a.simple_writes.find(arr); it != a.simple_writes.end())
        if (auto jt = it->second.find(k); jt != it->second.end()) wa = &jt->second;
      if (auto it = b.simple_writes.find(arr); it != b.simple_writes.end())
        if (auto jt = it->second.find(k); jt != it->second.end()) wb = &jt->second;
      // value on the path that skipped the write: the preexisting entry,
      // unless the base state had already written it
      SymRange base_val;
      if (auto it = ctx.simple_writes.find(arr); it != ctx.simple_writes.end()) {
        if (auto jt = it->second.find(k); jt != it->second.end()) base_val = jt->second.value;
        else base_val = entry_value_at(ctx, arr, k);
      } else {
        base_val = entry_value_at(ctx, arr, k);
      }
      SymRange va = wa ? wa->value : base_val;
      SymRange vb = wb ? wb->value : base_val;
      ArrayWrite merged;
      merged.sub = WriteSub::simple(k);
      merged.value = range_union(va, vb, ctx.asms);
      merged.conditional = (wa == nullptr) != (wb == nullptr) ||
                           (wa != nullptr && wa->conditional) ||
                           (wb != nullptr && wb->conditional);
      merged.line = wa ? wa->line : (wb ? wb->line : 0);
      ctx.simple_writes[arr][k] = std::move(merged);
    }
  }

  // range writes (collapsed inner loops) under a branch: keep identical
  // entries, otherwise poison the array conservatively
  std::set<std::string> rw;
  for (const auto& [n, v] : a.range_writes) rw.insert(n);
  for (const auto& [n, v] : b.range_writes) rw.insert(n);
  for (const auto& arr : rw) {
    auto ia = a.range_writes.find(arr);
    auto ib = b.range_writes.find(arr);
    bool same = ia != a.range_writes.end() && ib != b.range_writes.end() &&
                ia->second.size() == ib->second.size();
    if (same) {
      for (size_t i = 0; i < ia->second.size(); ++i) {
        if (!(ia->second[i].sub.range == ib->second[i].sub.range) ||
            !(ia->second[i].value == ib->second[i].value)) {
          same = false;
          break;
        }
      }
    }
    if (same) {
      ctx.range_writes[arr] = ia->second;
    } else {
      ctx.poisoned_here.insert(arr);
      // keep a kill record covering the whole array
      ArrayWrite w;
      w.sub = WriteSub::non_simple();
      w.value = SymRange::bottom();
      ctx.range_writes[arr].push_back(std::move(w));
    }
  }

  for (const auto& n : a.poisoned_here) ctx.poisoned_here.insert(n);
  for (const auto& n : b.poisoned_here) ctx.poisoned_here.insert(n);
  for (const auto& n : a.poisoned_inherited) ctx.poisoned_inherited.insert(n);
  for (const auto& n : b.poisoned_inherited) ctx.poisoned_inherited.insert(n);
  for (const auto& n : a.arrays_read) ctx.arrays_read.insert(n);
  for (const auto& n : b.arrays_read) ctx.arrays_read.insert(n);
  for (const auto& n : a.hidden_scalars) ctx.hidden_scalars.insert(n);
  for (const auto& n : b.hidden_scalars) ctx.hidden_scalars.insert(n);
}

// Apply a collapsed inner loop's whole-loop effect to the enclosing body
// state.
void apply_inner(const LoopRecord& rec, const Stmt& loop, BodyCtx& ctx) {
  for (const auto& [name, eff] : rec.scalar_effects) {
    SymRange incoming = ctx.scalar_value(name);
    SymRange v = eff.is_bottom()
                     ? SymRange::bottom()
                     : eff.substitute_range(Atom::big_lambda(name), incoming);
    ctx.scalars[name] = v;
    ctx.written_scalars.insert(name);
    if (rec.body.hidden_scalars.count(name)) ctx.hidden_scalars.insert(name);
  }
  // the loop index's exit value is not tracked across the loop
  ctx.scalars[loop.index_var] = SymRange::bottom();
  ctx.written_scalars.insert(loop.index_var);
  ctx.hidden_scalars.insert(loop.index_var);

  for (const auto& [arr, wr] : rec.write_set) {
    if (!wr.has_value()) {
      ctx.poisoned_inherited.insert(arr);
      ArrayWrite w;
      w.sub = WriteSub::non_simple();
      w.value = SymRange::bottom();
      ctx.range_writes[arr].push_back(std::move(w));
      continue;
    }
    // find a value fact for the same array to carry its content
    SymRange value = SymRange::bottom();
    for (const auto& f : rec.facts) {
      if (f.array == arr && !f.is_property && f.index_range == *wr) {
        value = f.value;
        break;
      }
    }
    ArrayWrite w;
    w.sub = WriteSub::whole_range(*wr);
    w.value = value;
    w.line = loop.line;
    ctx.range_writes[arr].push_back(std::move(w));
  }
  for (const auto& a : rec.body.poisoned_here) ctx.poisoned_inherited.insert(a);
  for (const auto& a : rec.body.poisoned_inherited) ctx.poisoned_inherited.insert(a);
  for (const auto& a : rec.body.arrays_read) ctx.arrays_read.insert(a);
}

void exec_assign(const Stmt& s, BodyCtx& ctx) {
  SymRange value = eval_expr(*s.rhs, ctx);

  if (s.target.subscript == nullptr) {
    ctx.scalars[s.target.name] = value;
    ctx.written_scalars.insert(s.target.name);
    return;
  }

  const std::string& arr = s.target.name;
  SymRange sub = eval_expr(*s.target.subscript, ctx);

  // top level: straight-line point facts go directly to the store
  if (ctx.index.empty() && ctx.store != nullptr) {
    Assumptions asms = ctx.asms;
    asms.facts = ctx.store;
    if (sub.is_bottom())
      ctx.store->kill_array(arr);
    else
      ctx.store->kill_overlapping(arr, sub, asms);
    if (sub.is_point() && !value.is_bottom() && is_analyzable_array(*ctx.prog, arr)) {
      FactEntry f = FactEntry::value_range(arr, sub, value);
      f.origin = "line@" + std::to_string(s.line);
      f.rule = "point-assign";
      ctx.store->add(f);
    }
    return;
  }

  auto cls = classify_subscript(*s.target.subscript, ctx.index);
  if (cls.has_value()) {
    ArrayWrite w;
    w.sub = WriteSub::simple(*cls);
    w.value = is_analyzable_array(*ctx.prog, arr) ? value : SymRange::bottom();
    w.line = s.line;
    ctx.simple_writes[arr][*cls] = std::move(w);
  } else {
    // unanalyzable subscript: the whole array's content becomes unknown,
    // but scalar updates feeding the subscript stay tracked
    ctx.poisoned_here.insert(arr);
  }
}

void exec_stmt(const Stmt& s, BodyCtx& ctx) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      exec_assign(s, ctx);
      return;
    case Stmt::Kind::If: {
      // conditions are evaluated for their reads only; no path-sensitive
      // narrowing of ranges
      eval_expr(*s.cond.lhs, ctx);
      eval_expr(*s.cond.rhs, ctx);
      BodyCtx a = ctx;
      BodyCtx b = ctx;
      ProgramFacts fa, fb;
      if (ctx.store != nullptr) {
        // isolate straight-line fact updates per branch, keep the agreement
        fa = *ctx.store;
        fb = *ctx.store;
        a.store = &fa;
        b.store = &fb;
      }
      exec_block(s.then_block, a);
      exec_block(s.else_block, b);
      merge_branches(ctx, a, b);
      if (ctx.store != nullptr) {
        ProgramFacts merged;
        for (const auto& f : fa.entries()) {
          for (const auto& g : fb.entries()) {
            if (f.str() == g.str()) {
              merged.add(f);
              break;
            }
          }
        }
        *ctx.store = std::move(merged);
      }
      return;
    }
    case Stmt::Kind::For: {
      if (ctx.store != nullptr) {
        // top level: analyze the nest against a view without facts on the
        // arrays it writes, then collapse into the store at this point
        std::set<std::string> written = nest_written_arrays(s);
        auto filtered = std::make_shared<ProgramFacts>();
        for (const auto& f : ctx.store->entries())
          if (!written.count(f.array)) filtered->add(f);
        BodyCtx nest = ctx;
        nest.store = nullptr;
        nest.facts = filtered;
        nest.asms.facts = filtered.get();
        LoopRecord rec = analyze_loop(s, nest);
        for (const auto& n : nest.arrays_read) ctx.arrays_read.insert(n);
        collapse(rec, *ctx.store, ctx.scalars, ctx.asms);
        if (ctx.records != nullptr) ctx.records->push_back(std::move(rec));
        return;
      }
      LoopRecord rec = analyze_loop(s, ctx);
      apply_inner(rec, s, ctx);
      if (ctx.records != nullptr) ctx.records->push_back(std::move(rec));
      return;
    }
  }
}

}  // namespace

SymRange BodyCtx::scalar_value(const std::string& name) const {
  if (auto it = scalars.find(name); it != scalars.end()) return it->second;
  if (prog->is_param(name)) return SymRange::point(SymExpr::var(name));
  if (name == index || outer_indexes.count(name))
    return SymRange::point(SymExpr::loop_index(name));
  if (zero_init_scalars) return SymRange::lit(0, 0);
  return SymRange::point(SymExpr::lambda(name));
}

SymRange eval_expr(const Expr& e, BodyCtx& ctx) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return SymRange::lit(e.value, e.value);
    case Expr::Kind::Ref: {
      if (e.subscripts.empty()) return ctx.scalar_value(e.name);
      ctx.arrays_read.insert(e.name);
      for (const auto& sexp : e.subscripts) eval_expr(*sexp, ctx);  // record nested reads
      if (!is_analyzable_array(*ctx.prog, e.name)) return SymRange::bottom();
      if (ctx.array_poisoned(e.name)) return SymRange::bottom();
      SymRange sub = eval_expr(*e.subscripts[0], ctx);
      if (sub.is_bottom()) return SymRange::bottom();

      // store-forward from a simple write recorded earlier in this body
      if (!ctx.index.empty()) {
        if (auto cls = classify_subscript(*e.subscripts[0], ctx.index)) {
          auto it = ctx.simple_writes.find(e.name);
          if (it != ctx.simple_writes.end()) {
            auto jt = it->second.find(*cls);
            if (jt != it->second.end() && !jt->second.conditional) return jt->second.value;
          }
        }
      }
      // content written by a collapsed inner loop earlier in this body
      if (auto it = ctx.range_writes.find(e.name); it != ctx.range_writes.end()) {
        for (const auto& w : it->second) {
          if (w.sub.kind != WriteSub::Kind::Range || w.value.is_bottom() || w.conditional)
            continue;
          if (range_covered(widen_over_domains(sub, ctx.asms), w.sub.range, ctx.asms))
            return w.value;
        }
      }
      // a known value-range fact, gated on subscript containment
      if (ctx.facts != nullptr) {
        SymRange widened = widen_over_domains(sub, ctx.asms);
        if (const FactEntry* f = ctx.facts->value_range_covering(e.name, widened, ctx.asms))
          return f->value;
      }
      // otherwise the element is an opaque atom at a definite index
      if (sub.is_point()) return SymRange::point(SymExpr::array_elem(e.name, sub.lo()));
      return SymRange::bottom();
    }
    case Expr::Kind::Binary: {
      SymRange l = eval_expr(*e.lhs, ctx);
      SymRange r = eval_expr(*e.rhs, ctx);
      switch (e.op) {
        case '+':
          return SymRange::add(l, r);
        case '-':
          return SymRange::sub(l, r);
        case '*':
          return SymRange::mul(l, r);
      }
      return SymRange::bottom();
    }
  }
  return SymRange::bottom();
}

void interpret_top_stmt(const Stmt& s, BodyCtx& ctx) { exec_stmt(s, ctx); }

BodySummary analyze_body(const Stmt& loop, BodyCtx& ctx) {
  exec_block(loop.body, ctx);

  BodySummary out;
  out.loop_index = ctx.index;
  for (const auto& name : ctx.written_scalars) out.scalar_exit[name] = ctx.scalar_value(name);
  for (const auto& [arr, offs] : ctx.simple_writes) {
    for (const auto& [k, w] : offs) out.array_writes[arr].push_back(w);
  }
  for (const auto& [arr, ws] : ctx.range_writes) {
    for (const auto& w : ws)
      if (w.sub.kind == WriteSub::Kind::Range) out.array_writes[arr].push_back(w);
  }
  out.poisoned_here = ctx.poisoned_here;
  out.poisoned_inherited = ctx.poisoned_inherited;
  out.arrays_read = ctx.arrays_read;
  out.hidden_scalars = ctx.hidden_scalars;
  return out;
}

}  // namespace idxpar

#include "idxpar/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "idxpar/parser.hpp"

namespace idxpar {

namespace {

long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw OracleTrap("integer overflow in +");
  return r;
}
long long checked_sub(long long a, long long b) {
  long long r;
  if (__builtin_sub_overflow(a, b, &r)) throw OracleTrap("integer overflow in -");
  return r;
}
long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw OracleTrap("integer overflow in *");
  return r;
}

class Interp {
 public:
  Interp(const Program& prog, Machine& m, const std::set<std::string>& traced)
      : prog_(prog), m_(m), traced_(traced) {}

  void run() {
    for (const auto& s : prog_.stmts) exec(*s);
  }

 private:
  const Program& prog_;
  Machine& m_;
  const std::set<std::string>& traced_;

  struct TracedFrame {
    std::string loop_id;
    long long instance;
    long long iteration;
  };
  std::vector<TracedFrame> trace_stack_;
  std::map<std::string, long long> instance_counts_;

  long long read_scalar(const std::string& name) {
    if (auto it = m_.params.find(name); it != m_.params.end()) return it->second;
    return m_.scalars[name];  // zero-filled
  }

  long long flat_index(const Expr& ref) {
    const ArrayDecl* decl = prog_.array(ref.name);
    if (decl->extents.size() == 1) {
      long long i = eval(*ref.subscripts[0]);
      long long n = m_.array_size(ref.name);
      if (i < 0 || i >= n)
        throw OracleTrap("index " + std::to_string(i) + " out of bounds for " + ref.name +
                         "[" + std::to_string(n) + "] at line " + std::to_string(ref.line));
      return i;
    }
    long long i = eval(*ref.subscripts[0]);
    long long j = eval(*ref.subscripts[1]);
    auto [r, c] = m_.dims.at(ref.name);
    if (i < 0 || i >= r || j < 0 || j >= c)
      throw OracleTrap("index (" + std::to_string(i) + "," + std::to_string(j) +
                       ") out of bounds for " + ref.name + " at line " + std::to_string(ref.line));
    return i * c + j;
  }

  long long eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return e.value;
      case Expr::Kind::Ref: {
        if (e.subscripts.empty()) return read_scalar(e.name);
        return m_.arrays.at(e.name)[flat_index(e)];
      }
      case Expr::Kind::Binary: {
        long long l = eval(*e.lhs);
        long long r = eval(*e.rhs);
        switch (e.op) {
          case '+': return checked_add(l, r);
          case '-': return checked_sub(l, r);
          case '*': return checked_mul(l, r);
        }
        throw InternalError("bad operator");
      }
    }
    throw InternalError("bad expression");
  }

  bool eval_cond(const Cond& c) {
    long long l = eval(*c.lhs);
    long long r = eval(*c.rhs);
    if (c.op == "==") return l == r;
    if (c.op == "!=") return l != r;
    if (c.op == "<") return l < r;
    if (c.op == "<=") return l <= r;
    if (c.op == ">") return l > r;
    if (c.op == ">=") return l >= r;
    throw InternalError("bad comparison");
  }

  void exec(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        long long v = eval(*s.rhs);
        if (s.target.subscript == nullptr) {
          m_.scalars[s.target.name] = v;
          return;
        }
        Expr ref;
        ref.kind = Expr::Kind::Ref;
        ref.name = s.target.name;
        ref.line = s.line;
        ref.subscripts.push_back(s.target.subscript->clone());
        long long idx = flat_index(ref);
        m_.arrays.at(s.target.name)[idx] = v;
        for (const auto& fr : trace_stack_)
          m_.writes.push_back({fr.loop_id, fr.instance, fr.iteration, s.target.name, idx});
        return;
      }
      case Stmt::Kind::If: {
        const auto& block = eval_cond(s.cond) ? s.then_block : s.else_block;
        for (const auto& t : block) exec(*t);
        return;
      }
      case Stmt::Kind::For: {
        long long lo = eval(*s.lower);
        long long hi = eval(*s.upper);  // exclusive, loop-invariant by construction
        bool traced = traced_.count(s.loop_id()) > 0;
        if (traced) {
          long long inst = instance_counts_[s.loop_id()]++;
          trace_stack_.push_back({s.loop_id(), inst, 0});
        }
        for (long long i = lo; i < hi; ++i) {
          m_.scalars[s.index_var] = i;
          if (traced) trace_stack_.back().iteration = i - lo;
          for (const auto& t : s.body) exec(*t);
        }
        if (traced) trace_stack_.pop_back();
        return;
      }
    }
  }
};

long long eval_extent(const Program& prog, const Expr& e,
                      const std::map<std::string, long long>& params) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      return e.value;
    case Expr::Kind::Ref: {
      auto it = params.find(e.name);
      if (it == params.end())
        throw OracleTrap("array extent references unbound name '" + e.name + "'");
      return it->second;
    }
    case Expr::Kind::Binary: {
      long long l = eval_extent(prog, *e.lhs, params);
      long long r = eval_extent(prog, *e.rhs, params);
      switch (e.op) {
        case '+': return checked_add(l, r);
        case '-': return checked_sub(l, r);
        case '*': return checked_mul(l, r);
      }
    }
  }
  throw OracleTrap("unsupported extent expression");
}

}  // namespace

long long Machine::array_size(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end()) throw OracleTrap("unknown array '" + name + "'");
  return static_cast<long long>(it->second.size());
}

Machine interpret(const Program& prog, const std::map<std::string, long long>& params,
                  const std::map<std::string, std::vector<long long>>& initial,
                  const std::set<std::string>& traced,
                  const std::map<std::string, long long>& initial_scalars) {
  Machine m;
  for (const auto& p : prog.params) {
    auto it = params.find(p);
    if (it == params.end()) throw OracleTrap("parameter '" + p + "' is unbound");
    if (it->second < 1)
      throw OracleTrap("parameter '" + p + "' must be positive, got " +
                       std::to_string(it->second));
    m.params[p] = it->second;
  }
  for (const auto& a : prog.arrays) {
    long long sz;
    if (a.extents.size() == 1) {
      sz = eval_extent(prog, *a.extents[0], m.params);
    } else {
      long long r = eval_extent(prog, *a.extents[0], m.params);
      long long c = eval_extent(prog, *a.extents[1], m.params);
      m.dims[a.name] = {r, c};
      sz = checked_mul(r, c);
    }
    if (sz < 1) throw OracleTrap("array '" + a.name + "' has non-positive size");
    m.arrays[a.name].assign(static_cast<size_t>(sz), 0);
  }
  for (const auto& [name, data] : initial) {
    auto it = m.arrays.find(name);
    if (it == m.arrays.end()) throw OracleTrap("initial data for unknown array '" + name + "'");
    if (data.size() != it->second.size())
      throw OracleTrap("initial data size mismatch for '" + name + "'");
    it->second = data;
  }
  for (const auto& [name, v] : initial_scalars) {
    if (prog.scalar(name) == nullptr) throw OracleTrap("initial value for unknown scalar '" + name + "'");
    m.scalars[name] = v;
  }
  Interp in(prog, m, traced);
  in.run();
  return m;
}

std::optional<std::pair<long long, long long>> check_property(
    const std::vector<long long>& values, std::pair<long long, long long> range,
    ArrayProperty property) {
  auto [a, b] = range;
  if (a > b) return std::nullopt;  // vacuous
  if (a < 0 || b >= static_cast<long long>(values.size()))
    throw OracleTrap("property range out of bounds");
  auto adjacent = [&](auto&& bad) -> std::optional<std::pair<long long, long long>> {
    for (long long i = a; i <= b; ++i) {
      if (i - 1 < 0) throw OracleTrap("property range out of bounds");
      if (bad(values[i - 1], values[i])) return std::make_pair(i - 1, i);
    }
    return std::nullopt;
  };
  switch (property) {
    case ArrayProperty::MonotonicInc:
      return adjacent([](long long x, long long y) { return x > y; });
    case ArrayProperty::MonotonicDec:
      return adjacent([](long long x, long long y) { return x < y; });
    case ArrayProperty::StrictMonotonicInc:
      return adjacent([](long long x, long long y) { return x >= y; });
    case ArrayProperty::StrictMonotonicDec:
      return adjacent([](long long x, long long y) { return x <= y; });
    case ArrayProperty::Injective: {
      // lexicographically minimal duplicate pair (i, j), i < j
      std::unordered_map<long long, long long> first;
      std::optional<std::pair<long long, long long>> best;
      for (long long j = a; j <= b; ++j) {
        auto [it, inserted] = first.try_emplace(values[j], j);
        if (!inserted) {
          std::pair<long long, long long> cand{it->second, j};
          if (!best || cand < *best) best = cand;
        }
      }
      return best;
    }
    case ArrayProperty::Identity: {
      for (long long i = a; i <= b; ++i)
        if (values[i] != i) return std::make_pair(i, i);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<Conflict> check_output_independence(
    const Program& prog, const std::string& loop_id,
    const std::map<std::string, long long>& params,
    const std::map<std::string, std::vector<long long>>& initial, bool skip_first_iteration,
    const std::string& only_array) {
  if (prog.find_loop(loop_id) == nullptr)
    throw InternalError("check_output_independence: no loop '" + loop_id + "'");
  Machine m = interpret(prog, params, initial, {loop_id});
  // (instance, array, index) -> first iteration that wrote it
  std::map<std::tuple<long long, std::string, long long>, long long> seen;
  for (const auto& w : m.writes) {
    if (w.loop_id != loop_id) continue;
    if (skip_first_iteration && w.iteration == 0) continue;
    if (!only_array.empty() && w.array != only_array) continue;
    auto key = std::make_tuple(w.instance, w.array, w.index);
    auto [it, inserted] = seen.try_emplace(key, w.iteration);
    if (!inserted && it->second != w.iteration)
      return Conflict{it->second, w.iteration, w.array, w.index};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Input generation

std::set<std::string> input_arrays(const Program& prog) {
  std::set<std::string> written, result;
  std::function<void(const Expr&)> scan_reads = [&](const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return;
      case Expr::Kind::Ref:
        if (!e.subscripts.empty() && !written.count(e.name)) result.insert(e.name);
        for (const auto& s : e.subscripts) scan_reads(*s);
        return;
      case Expr::Kind::Binary:
        scan_reads(*e.lhs);
        scan_reads(*e.rhs);
        return;
    }
  };
  std::function<void(const std::vector<StmtPtr>&)> walk = [&](const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          if (s->target.subscript) scan_reads(*s->target.subscript);
          scan_reads(*s->rhs);
          if (s->target.subscript) written.insert(s->target.name);
          break;
        case Stmt::Kind::If:
          scan_reads(*s->cond.lhs);
          scan_reads(*s->cond.rhs);
          walk(s->then_block);
          walk(s->else_block);
          break;
        case Stmt::Kind::For:
          scan_reads(*s->lower);
          scan_reads(*s->upper);
          walk(s->body);
          break;
      }
    }
  };
  walk(prog.stmts);
  return result;
}

ShapeSpec ShapeSpec::for_kernel_file(const std::string& knl_path) {
  ShapeSpec spec;
  std::string side = knl_path;
  auto dot = side.rfind(".knl");
  if (dot != std::string::npos) side = side.substr(0, dot);
  side += ".shape.json";
  std::ifstream in(side);
  if (!in) return spec;
  nlohmann::json j;
  in >> j;
  if (j.contains("params")) {
    for (auto& [k, v] : j["params"].items())
      spec.param_ranges[k] = {v[0].get<long long>(), v[1].get<long long>()};
  }
  if (j.contains("densities")) spec.densities = j["densities"].get<std::vector<double>>();
  if (j.contains("values")) {
    for (auto& [k, v] : j["values"].items())
      spec.value_bounds[k] = {v[0].get<std::string>(), v[1].get<std::string>()};
  }
  return spec;
}

namespace {
long long eval_bound_expr(const std::string& text,
                          const std::map<std::string, long long>& params) {
  // bounds are small expressions over the params; reuse the full parser by
  // wrapping the expression in a one-statement program
  std::string src = "param ";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) src += ", ";
    src += k;
    first = false;
  }
  if (first) src = "";  // no params
  else src += ";\n";
  src += "int __b;\n__b = " + text + ";\n";
  auto res = parse(src);
  if (!res.ok()) throw OracleTrap("bad shape bound expression '" + text + "'");
  std::map<std::string, std::vector<long long>> none;
  Machine m = interpret(*res.program, params, none);
  return m.scalars.at("__b");
}
}  // namespace

GeneratedInput generate_input(const Program& prog, const ShapeSpec& shape, uint64_t seed,
                              uint64_t trial) {
  GeneratedInput out;
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + trial + 1);
  for (const auto& p : prog.params) {
    auto it = shape.param_ranges.find(p);
    long long lo = 1, hi = 200;
    if (it != shape.param_ranges.end()) {
      lo = it->second.first;
      hi = it->second.second;
    }
    std::uniform_int_distribution<long long> d(lo, hi);
    long long v = d(rng);
    // skew toward small shapes so boundary cases show up often
    if (rng() % 3 == 0) v = std::min(hi, lo + static_cast<long long>(rng() % 4));
    out.params[p] = v;
  }
  out.density =
      shape.densities.empty() ? 0.3 : shape.densities[trial % shape.densities.size()];

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<long long> small(1, 9);
  for (const auto& name : input_arrays(prog)) {
    const ArrayDecl* decl = prog.array(name);
    if (decl == nullptr) continue;
    long long size = 1;
    for (const auto& ext : decl->extents) size *= eval_extent(prog, *ext, out.params);
    std::vector<long long> data(static_cast<size_t>(size), 0);
    auto vb = shape.value_bounds.find(name);
    if (vb != shape.value_bounds.end()) {
      long long lo = eval_bound_expr(vb->second.lo_expr, out.params);
      long long hi = eval_bound_expr(vb->second.hi_expr, out.params);
      if (lo > hi) hi = lo;
      std::uniform_int_distribution<long long> d(lo, hi);
      for (auto& v : data) v = d(rng);
    } else {
      for (auto& v : data) v = coin(rng) < out.density ? small(rng) : 0;
    }
    out.arrays[name] = std::move(data);
  }
  return out;
}

}  // namespace idxpar

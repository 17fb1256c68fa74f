#include "idxpar/report.hpp"

#include <algorithm>
#include <sstream>

#include "idxpar/diag.hpp"

namespace idxpar {

AnalysisOutput analyze_program(const Program& prog) {
  AnalysisOutput out;
  out.pipeline = run_pipeline(prog);
  for (const LoopRecord& rec : out.pipeline.loops) {
    const Stmt* loop = prog.find_loop(rec.id);
    if (loop == nullptr) throw InternalError("pipeline produced unknown loop id " + rec.id);
    out.verdicts.push_back(classify_loop(*loop, prog, rec));
  }
  return out;
}

namespace {

nlohmann::ordered_json range_json(const SymRange& r) {
  if (r.is_bottom()) return nullptr;
  nlohmann::ordered_json j;
  j["lo"] = r.lo().str();
  j["hi"] = r.hi().str();
  return j;
}

nlohmann::ordered_json fact_json(const FactEntry& f) {
  nlohmann::ordered_json j;
  j["array"] = f.array;
  j["index_range"] = range_json(f.index_range);
  j["kind"] = f.is_property ? "property" : "value_range";
  if (f.is_property) {
    j["property"] = to_string(f.property);
  } else {
    j["value"] = range_json(f.value);
  }
  j["origin"] = f.origin;
  j["rule"] = f.rule;
  j["derived"] = f.derived;
  return j;
}

nlohmann::ordered_json step_json(const ProofStep& s) {
  nlohmann::ordered_json j;
  j["query"] = s.query;
  j["result"] = s.result;
  j["facts_used"] = s.facts_used;
  return j;
}

}  // namespace

nlohmann::ordered_json build_report(const std::string& file, const AnalysisOutput& out) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["file"] = file;
  j["diagnostics"] = nlohmann::ordered_json::array();

  auto facts = nlohmann::ordered_json::array();
  for (const auto& f : out.pipeline.facts.entries()) facts.push_back(fact_json(f));
  j["facts"] = facts;

  // loops in source order
  std::vector<size_t> order(out.verdicts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return out.verdicts[a].line < out.verdicts[b].line;
  });

  auto loops = nlohmann::ordered_json::array();
  for (size_t idx : order) {
    const Verdict& v = out.verdicts[idx];
    nlohmann::ordered_json lj;
    lj["id"] = v.loop_id;
    lj["line"] = v.line;
    lj["verdict"] = to_string(v.decision);
    lj["rule"] = to_string(v.rule);
    lj["peeled_first_iteration"] = v.peeled_first_iteration;
    lj["private"] = v.private_scalars;
    lj["reason"] = v.reason.empty() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(v.reason);
    if (v.witness.has_value()) {
      nlohmann::ordered_json w;
      w["iter1"] = v.witness->iter1;
      w["iter2"] = v.witness->iter2;
      w["array"] = v.witness->array;
      w["location"] = v.witness->location;
      lj["witness"] = w;
    } else {
      lj["witness"] = nullptr;
    }
    auto proof = nlohmann::ordered_json::array();
    for (const auto& s : v.proof) proof.push_back(step_json(s));
    lj["proof"] = proof;
    loops.push_back(lj);
  }
  j["loops"] = loops;
  return j;
}

std::string render_explain(const AnalysisOutput& out, const std::string& loop_id) {
  for (const Verdict& v : out.verdicts) {
    if (v.loop_id != loop_id) continue;
    std::ostringstream os;
    os << v.loop_id << " (line " << v.line << "): " << to_string(v.decision);
    if (v.decision == Decision::Parallel) {
      os << " via " << to_string(v.rule);
      if (v.peeled_first_iteration) os << " (first iteration peeled)";
    }
    os << "\n";
    if (!v.private_scalars.empty()) {
      os << "  private:";
      for (const auto& p : v.private_scalars) os << ' ' << p;
      os << "\n";
    }
    if (!v.reason.empty()) os << "  reason: " << v.reason << "\n";
    if (v.witness.has_value())
      os << "  witness: iterations " << v.witness->iter1 << " and " << v.witness->iter2
         << " write " << v.witness->array << "[" << v.witness->location << "]\n";
    int n = 1;
    for (const auto& s : v.proof) {
      os << "  [" << n++ << "] " << s.query << " -> " << s.result << "\n";
      for (const auto& f : s.facts_used) os << "        using " << f << "\n";
    }
    return os.str();
  }
  throw InternalError("no loop with id '" + loop_id + "'");
}

std::map<std::string, LoopAnnotation> annotations_from_verdicts(
    const std::vector<Verdict>& verdicts) {
  std::map<std::string, LoopAnnotation> out;
  for (const Verdict& v : verdicts) {
    LoopAnnotation a;
    // peeled proofs cover iterations 1..n-1 only; emitting the pragma
    // would need the loop split first
    a.parallel = v.decision == Decision::Parallel && !v.peeled_first_iteration;
    a.private_scalars = v.private_scalars;
    out[v.loop_id] = a;
  }
  return out;
}

}  // namespace idxpar

#include "idxpar/validate.hpp"

#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace idxpar {

namespace {

std::optional<long long> eval_with_params(const SymExpr& e,
                                          const std::map<std::string, long long>& params) {
  Valuation v;
  v.var = [&](const std::string& n) -> std::optional<long long> {
    auto it = params.find(n);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  return e.eval(v);
}

}  // namespace

ValidationSummary validate_analysis(const std::string& file, const Program& prog,
                                    const AnalysisOutput& out, const ShapeSpec& shape,
                                    uint64_t trials, uint64_t seed, std::ostream* log) {
  ValidationSummary sum;
  sum.trials = trials;

  std::set<std::string> traced;
  for (const Verdict& v : out.verdicts)
    if (v.decision == Decision::Parallel || v.decision == Decision::Serial)
      traced.insert(v.loop_id);

  std::map<std::string, uint64_t> serial_reproductions;

  for (uint64_t trial = 0; trial < trials; ++trial) {
    GeneratedInput in = generate_input(prog, shape, seed, trial);
    Machine m;
    try {
      m = interpret(prog, in.params, in.arrays, traced);
    } catch (const OracleTrap& t) {
      sum.issues.push_back({file, trial, seed, std::string("oracle trap: ") + t.what()});
      continue;
    }

    // facts in the final store hold in the final memory
    for (const FactEntry& f : out.pipeline.facts.entries()) {
      ++sum.facts_checked;
      auto lo = eval_with_params(f.index_range.lo(), in.params);
      auto hi = eval_with_params(f.index_range.hi(), in.params);
      if (!lo || !hi) {
        sum.issues.push_back({file, trial, seed,
                              "fact has non-concrete index range: " + f.str()});
        continue;
      }
      if (*lo > *hi) continue;  // vacuous on this shape
      auto it = m.arrays.find(f.array);
      if (it == m.arrays.end()) {
        sum.issues.push_back({file, trial, seed, "fact names unknown array: " + f.str()});
        continue;
      }
      const auto& data = it->second;
      if (f.is_property) {
        long long check_lo = *lo;
        if (f.property == ArrayProperty::MonotonicInc ||
            f.property == ArrayProperty::MonotonicDec ||
            f.property == ArrayProperty::StrictMonotonicInc ||
            f.property == ArrayProperty::StrictMonotonicDec) {
          if (check_lo - 1 < 0 || *hi >= static_cast<long long>(data.size())) {
            sum.issues.push_back({file, trial, seed, "fact range out of bounds: " + f.str()});
            continue;
          }
        }
        std::optional<std::pair<long long, long long>> cex;
        try {
          cex = check_property(data, {check_lo, *hi}, f.property);
        } catch (const OracleTrap& t) {
          sum.issues.push_back({file, trial, seed,
                                "fact range out of bounds: " + f.str() + " (" + t.what() + ")"});
          continue;
        }
        if (cex.has_value()) {
          sum.issues.push_back(
              {file, trial, seed,
               "fact refuted: " + f.str() + " – counterexample (" +
                   std::to_string(cex->first) + "," + std::to_string(cex->second) + ") values (" +
                   std::to_string(data[cex->first]) + "," + std::to_string(data[cex->second]) +
                   ")"});
        }
      } else {
        auto vlo = eval_with_params(f.value.lo(), in.params);
        auto vhi = eval_with_params(f.value.hi(), in.params);
        if (!vlo || !vhi) {
          sum.issues.push_back({file, trial, seed,
                                "fact has non-concrete value range: " + f.str()});
          continue;
        }
        for (long long i = *lo; i <= *hi; ++i) {
          if (i < 0 || i >= static_cast<long long>(data.size())) {
            sum.issues.push_back({file, trial, seed, "fact range out of bounds: " + f.str()});
            break;
          }
          if (data[i] < *vlo || data[i] > *vhi) {
            sum.issues.push_back({file, trial, seed,
                                  "fact refuted: " + f.str() + " – " + f.array + "[" +
                                      std::to_string(i) + "] = " + std::to_string(data[i])});
            break;
          }
        }
      }
    }

    // verdict replay from the write trace
    for (const Verdict& v : out.verdicts) {
      if (v.decision == Decision::Unknown) continue;
      ++sum.verdicts_checked;
      std::map<std::tuple<long long, std::string, long long>, long long> seen;
      std::optional<Conflict> conflict;
      for (const WriteEvent& w : m.writes) {
        if (w.loop_id != v.loop_id) continue;
        if (v.decision == Decision::Parallel && v.peeled_first_iteration && w.iteration == 0)
          continue;
        auto key = std::make_tuple(w.instance, w.array, w.index);
        auto [it, inserted] = seen.try_emplace(key, w.iteration);
        if (!inserted && it->second != w.iteration) {
          conflict = Conflict{it->second, w.iteration, w.array, w.index};
          break;
        }
      }
      if (v.decision == Decision::Parallel && conflict.has_value()) {
        sum.issues.push_back(
            {file, trial, seed,
             "parallel verdict refuted for " + v.loop_id + ": iterations " +
                 std::to_string(conflict->iter1) + " and " + std::to_string(conflict->iter2) +
                 " both write " + conflict->array + "[" + std::to_string(conflict->index) + "]"});
      }
      if (v.decision == Decision::Serial && conflict.has_value())
        ++serial_reproductions[v.loop_id];
    }
  }

  for (const Verdict& v : out.verdicts) {
    if (v.decision != Decision::Serial) continue;
    if (trials > 0 && serial_reproductions[v.loop_id] == 0)
      sum.issues.push_back({file, 0, seed,
                            "serial witness for " + v.loop_id +
                                " never reproduced on generated inputs"});
  }

  if (log != nullptr) {
    *log << file << ": " << sum.facts_checked << " fact checks, " << sum.verdicts_checked
         << " verdict checks over " << trials << " trials – "
         << (sum.ok() ? "all confirmed" : std::to_string(sum.issues.size()) + " FAILURE(S)")
         << "\n";
    for (const auto& i : sum.issues)
      *log << "  trial " << i.trial << " (seed " << i.seed << "): " << i.what << "\n";
  }
  return sum;
}

}  // namespace idxpar

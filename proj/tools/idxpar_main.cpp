#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "idxpar/diag.hpp"
#include "idxpar/oracle.hpp"
#include "idxpar/parser.hpp"
#include "idxpar/printer.hpp"
#include "idxpar/report.hpp"
#include "idxpar/validate.hpp"

namespace {

using namespace idxpar;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_name(const std::string& path, const std::string& suffix) {
  std::string base = path;
  if (auto pos = base.rfind(".knl"); pos != std::string::npos && pos == base.size() - 4)
    base = base.substr(0, pos);
  return base + suffix;
}

std::map<std::string, long long> parse_param_args(const std::vector<std::string>& kvs) {
  std::map<std::string, long long> out;
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected K=V, got '" + kv + "'");
    out[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1));
  }
  return out;
}

int run_analyze(const std::vector<std::string>& paths, bool do_annotate,
                const std::string& report_path, bool trace, const std::string& explain_id) {
  if (!report_path.empty() && paths.size() != 1) {
    std::cerr << "--report requires exactly one input file\n";
    return 2;
  }
  bool any_diag = false;
  for (const auto& path : paths) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << path << ":1:1: file not found\n";
      any_diag = true;
      continue;
    }
    ParseResult pr = parse(*text);
    if (!pr.ok()) {
      for (const auto& d : pr.diagnostics) std::cerr << format_diagnostic(path, d) << "\n";
      any_diag = true;
      continue;
    }
    AnalysisOutput out = analyze_program(*pr.program);

    if (trace) std::cout << render_trace(out.pipeline);
    if (!explain_id.empty()) std::cout << render_explain(out, explain_id);

    nlohmann::ordered_json rep = build_report(path, out);
    std::string rpath = report_path.empty() ? path + ".report.json" : report_path;
    std::ofstream rf(rpath, std::ios::binary);
    rf << rep.dump(2) << "\n";

    if (do_annotate) {
      std::string annotated = annotate(*pr.program, annotations_from_verdicts(out.verdicts));
      std::ofstream af(output_name(path, ".par.knl"), std::ios::binary);
      af << annotated;
    }
  }
  return any_diag ? 1 : 0;
}

int run_validate(const std::vector<std::string>& paths, uint64_t trials, uint64_t seed) {
  if (trials == 0)
    std::cerr << "warning: --trials 0 – every check passes vacuously\n";
  bool any_diag = false, any_fail = false;
  for (const auto& path : paths) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << path << ":1:1: file not found\n";
      any_diag = true;
      continue;
    }
    ParseResult pr = parse(*text);
    if (!pr.ok()) {
      for (const auto& d : pr.diagnostics) std::cerr << format_diagnostic(path, d) << "\n";
      any_diag = true;
      continue;
    }
    AnalysisOutput out = analyze_program(*pr.program);
    ShapeSpec shape = ShapeSpec::for_kernel_file(path);
    ValidationSummary sum =
        validate_analysis(path, *pr.program, out, shape, trials, seed, &std::cout);
    any_fail = any_fail || !sum.ok();
  }
  if (any_diag) return 1;
  return any_fail ? 1 : 0;
}

int run_oracle(const std::string& path, const std::vector<std::string>& param_kvs,
               uint64_t seed, const std::string& dump, const std::string& trace_loop) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << path << ":1:1: file not found\n";
    return 1;
  }
  ParseResult pr = parse(*text);
  if (!pr.ok()) {
    for (const auto& d : pr.diagnostics) std::cerr << format_diagnostic(path, d) << "\n";
    return 1;
  }
  const Program& prog = *pr.program;
  std::map<std::string, long long> params = parse_param_args(param_kvs);
  for (const auto& p : prog.params) {
    if (!params.count(p)) {
      std::cerr << "parameter '" << p << "' is unbound; pass --param " << p << "=N\n";
      return 1;
    }
  }
  ShapeSpec shape = ShapeSpec::for_kernel_file(path);
  for (const auto& [k, v] : params) shape.param_ranges[k] = {v, v};
  GeneratedInput in = generate_input(prog, shape, seed, /*trial=*/seed);
  in.params = params;

  std::set<std::string> traced;
  if (!trace_loop.empty()) traced.insert(trace_loop);
  Machine m = interpret(prog, in.params, in.arrays, traced);

  if (dump == "json") {
    nlohmann::ordered_json j;
    j["params"] = in.params;
    j["scalars"] = m.scalars;
    nlohmann::ordered_json arrays;
    for (const auto& [name, data] : m.arrays) arrays[name] = data;
    j["arrays"] = arrays;
    if (!trace_loop.empty()) {
      auto tr = nlohmann::ordered_json::array();
      for (const auto& w : m.writes) {
        nlohmann::ordered_json e;
        e["loop"] = w.loop_id;
        e["instance"] = w.instance;
        e["iteration"] = w.iteration;
        e["array"] = w.array;
        e["index"] = w.index;
        tr.push_back(e);
      }
      j["writes"] = tr;
    }
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"idxpar – parallelizability analysis for subscripted-subscript loops"};
  app.require_subcommand(1);

  // analyze
  std::vector<std::string> a_paths;
  bool a_annotate = false, a_trace = false;
  std::string a_report, a_explain;
  CLI::App* analyze = app.add_subcommand("analyze", "analyze kernels and emit reports");
  analyze->add_option("paths", a_paths, "kernel files (.knl)")->required();
  analyze->add_flag("--annotate", a_annotate, "also write <file>.par.knl with pragmas");
  analyze->add_option("--report", a_report, "report path (single input only)");
  analyze->add_flag("--trace-aggregation", a_trace, "print the phase 1/2 listing");
  analyze->add_option("--explain", a_explain, "print the proof trace for a loop id");

  // validate
  std::vector<std::string> v_paths;
  uint64_t v_trials = 100, v_seed = 1;
  CLI::App* validate = app.add_subcommand("validate", "oracle-check facts and verdicts");
  validate->add_option("paths", v_paths, "kernel files (.knl)")->required();
  validate->add_option("--trials", v_trials, "generated inputs per file (default 100)");
  validate->add_option("--seed", v_seed, "generator seed (default 1)");

  // oracle run
  CLI::App* oracle = app.add_subcommand("oracle", "reference interpreter");
  std::string o_path, o_dump = "json", o_trace;
  std::vector<std::string> o_params;
  uint64_t o_seed = 1;
  CLI::App* oracle_run = oracle->add_subcommand("run", "execute one kernel");
  oracle_run->add_option("file", o_path, "kernel file")->required();
  oracle_run->add_option("--param,--params", o_params, "parameter binding K=V (repeatable)");
  oracle_run->add_option("--seed", o_seed, "input generator seed");
  oracle_run->add_option("--dump", o_dump, "output format (json)");
  oracle_run->add_option("--trace", o_trace, "record writes of the given loop id");
  oracle->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analyze(a_paths, a_annotate, a_report, a_trace, a_explain);
    if (*validate) return run_validate(v_paths, v_trials, v_seed);
    if (*oracle) return run_oracle(o_path, o_params, o_seed, o_dump, o_trace);
  } catch (const OracleTrap& t) {
    std::cerr << "oracle trap: " << t.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

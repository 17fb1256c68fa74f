#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idxpar/ast.hpp"
#include "idxpar/diag.hpp"
#include "idxpar/facts.hpp"

namespace idxpar {

// Execution trap: out-of-bounds access, unbound parameter, signed overflow.
struct OracleTrap : std::runtime_error {
  explicit OracleTrap(const std::string& what) : std::runtime_error(what) {}
};

// One recorded array store inside a traced loop.
struct WriteEvent {
  std::string loop_id;
  long long instance = 0;   // nth dynamic entry of the loop
  long long iteration = 0;  // iteration ordinal within that instance
  std::string array;
  long long index = 0;  // flattened for rank-2
};

// Concrete machine state. All storage is 64-bit signed; float-declared
// variables hold integers too (their values are never analyzed, only
// moved). Memory is zero-filled, matching C static storage.
struct Machine {
  std::map<std::string, long long> params;
  std::map<std::string, long long> scalars;
  std::map<std::string, std::vector<long long>> arrays;
  std::map<std::string, std::pair<long long, long long>> dims;  // rank-2 extents
  std::vector<WriteEvent> writes;

  long long array_size(const std::string& name) const;
};

// Execute the program with C semantics. `traced` selects loops whose array
// stores are recorded; stores in nested loops attribute to the iteration
// of each traced enclosing loop. `initial_scalars` overrides the zero
// fill (used to replay a program suffix from a snapshot).
Machine interpret(const Program& prog, const std::map<std::string, long long>& params,
                  const std::map<std::string, std::vector<long long>>& initial,
                  const std::set<std::string>& traced = {},
                  const std::map<std::string, long long>& initial_scalars = {});

// Exhaustive property check over values[range.first..range.second] using
// the FactEntry range conventions (adjacent pairs for monotonicity).
// Returns nullopt when the property holds, else the lexicographically
// minimal witness pair of indexes.
std::optional<std::pair<long long, long long>> check_property(
    const std::vector<long long>& values, std::pair<long long, long long> range,
    ArrayProperty property);

struct Conflict {
  long long iter1 = 0, iter2 = 0;
  std::string array;
  long long index = 0;
};

// Replays the write trace of `loop_id`: independent (nullopt) iff no
// (array, index) is written in two distinct iterations of the same dynamic
// instance of the loop.
std::optional<Conflict> check_output_independence(
    const Program& prog, const std::string& loop_id,
    const std::map<std::string, long long>& params,
    const std::map<std::string, std::vector<long long>>& initial,
    bool skip_first_iteration = false, const std::string& only_array = "");

// ---------------------------------------------------------------------------
// Deterministic input generation.

struct ValueBound {
  std::string lo_expr;  // symbolic in the params, e.g. "0", "nelt - 1"
  std::string hi_expr;
};

struct ShapeSpec {
  std::map<std::string, std::pair<long long, long long>> param_ranges;  // default [1:200]
  std::vector<double> densities = {0.0, 0.01, 0.3, 1.0};
  std::map<std::string, ValueBound> value_bounds;  // per input array

  // Loads `<kernel>.shape.json` when present next to the kernel file.
  static ShapeSpec for_kernel_file(const std::string& knl_path);
};

struct GeneratedInput {
  std::map<std::string, long long> params;
  std::map<std::string, std::vector<long long>> arrays;
  double density = 0.0;
};

// Deterministic given (seed, trial). Fills 2-D matrices with `density`
// nonzeros, bounded int inputs uniformly within their bounds, and default
// int inputs with density-gated values in [1:9].
GeneratedInput generate_input(const Program& prog, const ShapeSpec& shape, uint64_t seed,
                              uint64_t trial);

// Arrays read before any write in program order; these receive generated
// content, everything else starts zero-filled.
std::set<std::string> input_arrays(const Program& prog);

}  // namespace idxpar

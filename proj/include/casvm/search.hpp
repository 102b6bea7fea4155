#pragma once

// Multi-start coordinate search over a product of probability simplices.
// This is the shared engine behind the region optimizers: the decision
// variable is a list of conditional-probability tables, each a stack of
// simplex cells.

#include <cstdint>
#include <functional>
#include <vector>

namespace casvm {

struct SimplexBlock {
  std::size_t cells = 0;          // number of conditioning tuples
  std::size_t outcomes = 0;       // simplex dimension per cell
  std::vector<bool> allowed;      // per-outcome mask, shared by all cells; empty = all allowed

  bool outcome_allowed(std::size_t o) const { return allowed.empty() || allowed[o]; }
  std::size_t allowed_count() const;
  std::size_t size() const { return cells * outcomes; }
};

struct SearchConfig {
  int starts = 64;             // random restarts
  int sweeps = 200;            // refinement sweep cap per start
  int warm_sweeps = 12;        // soft-penalty sweeps before constraints harden
  std::size_t u_size = 0;      // auxiliary alphabet override; 0 = cardinality bound
  std::uint64_t seed = 1;
  bool vertex_seeds = true;    // enumerate deterministic channels as extra starts
  std::uint64_t vertex_cap = 8192;
  int vertex_keep = 16;        // deterministic seeds kept for full refinement
  double tol = 1e-12;
};

struct SearchEval {
  double objective = 0.0;  // value being minimized
  double violation = 0.0;  // total budget violation; 0 when feasible
  double cost = 0.0;       // first tie-break among equal objectives
};

struct SearchOutcome {
  bool feasible = false;
  double objective = 0.0;
  double violation = 0.0;
  double cost = 0.0;
  std::vector<double> point;  // concatenated block tables, row-major cells x outcomes
};

using SearchEvalFn = std::function<SearchEval(const std::vector<double>&)>;

// Runs `starts` random restarts (plus deterministic vertex seeds when the
// vertex count fits the cap, plus any caller-provided seed points), refines
// each by coordinate mass transfers, and returns the best feasible outcome;
// falls back to the least-infeasible point when nothing satisfies the
// budgets.  Starts run independently, so the reduction is deterministic no
// matter how they are scheduled.
SearchOutcome simplex_product_search(const std::vector<SimplexBlock>& blocks, const SearchEvalFn& eval,
                                     const SearchConfig& cfg,
                                     const std::vector<std::vector<double>>& extra_seeds = {});

}  // namespace casvm

#pragma once

// Rate-distortion-cost region for the three-node cascade with a controllable
// side-information channel at the end node.  The general point evaluator and
// the lossless specialization share one joint-distribution construction; the
// optimizer traces the weighted-sum boundary of the achievable region.
//
// The adaptive-action variant of this topology admits the same region, so a
// single set of evaluators covers both.

#include <cstddef>
#include <optional>
#include <vector>

#include "casvm/model.hpp"
#include "casvm/search.hpp"

namespace casvm {

// Decision variable of the region: p(xh1, a, u | x, y) together with the
// deterministic end-node decode f: U x Z -> Xhat2.  The auxiliary alphabet
// never needs more than |X||Y||A|+3 symbols.
struct CascadeTestChannel {
  ConditionalChannel ch;            // (xh1, a, u) given (x, y)
  std::vector<std::size_t> decode;  // row-major over (u, z), values in Xhat2

  std::size_t u_size() const { return ch.to()[2].size; }
};

std::size_t cascade_u_bound(const CascadeModel& m);

struct RegionPoint {
  double r1_min = 0.0;
  double r2_min = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double cost = 0.0;
};

// Joint pmf over (x, y, xh1, a, u, z) induced by the model and test channel.
JointDistribution cascade_joint(const CascadeModel& m, const ConditionalChannel& ch);

// End-node decode minimizing posterior expected d2 for each (u, z); ties go
// to the smallest reconstruction index.
std::vector<std::size_t> optimal_cascade_decode(const CascadeModel& m, const ConditionalChannel& ch);

RegionPoint eval_cascade_point(const CascadeModel& m, const CascadeTestChannel& t);

// Lossless specialization: the action channel p(a|x,y) is the only choice,
// both reconstructions are exact, distortions are zero by construction.
RegionPoint eval_cascade_lossless(const CascadeModel& m, const ConditionalChannel& action);

struct CascadeOptimizeResult {
  bool feasible = false;
  RegionPoint point;
  std::optional<CascadeTestChannel> channel;
};

// Approximately minimizes r1 + eta * r2 subject to the distortion and cost
// budgets.  Multi-start local search; deterministic for a fixed seed, and
// parallel runs reduce to the same result as serial ones.
CascadeOptimizeResult optimize_cascade(const CascadeModel& m, const CostBudget& cost_budget,
                                       const DistortionBudget& dist_budget, double eta,
                                       const SearchConfig& cfg);

}  // namespace casvm

#pragma once

// Cascade-broadcast regions: the lossless characterization, the switching
// special case with its two worked closed forms and the greedy-vs-optimal
// weighted sum-rate sweep, and the lossy region under the common
// reconstruction constraint for degraded side information.
//
// Adaptive actions do not enlarge any of these regions; the evaluators below
// cover the adaptive variants as well, and the no-end-node-side-information
// topology is the common reconstruction region evaluated with |Z| = 1.

#include <optional>
#include <vector>

#include "casvm/model.hpp"
#include "casvm/search.hpp"

namespace casvm {

struct BroadcastRegionPoint {
  double rb_min = 0.0;
  double r1_plus_rb_min = 0.0;
  double r2_plus_rb_min = 0.0;
  std::optional<double> r_sum_min;  // common-reconstruction evaluations only
  double cost = 0.0;
  std::optional<double> d1, d2;  // common-reconstruction evaluations only
};

// Smallest (Rb, R1, R2) satisfying the four bounds, minimized in that order.
struct RateTriple {
  double r1 = 0.0, r2 = 0.0, rb = 0.0;
};
RateTriple canonical_rate_triple(const BroadcastRegionPoint& p);

// p(a|x) and p(xh1, xh2 | x, a): the decision variable of the
// common-reconstruction region.
struct CRTestChannel {
  ConditionalChannel action;
  ConditionalChannel recon;
};

// Lossless bounds (Rb, R1+Rb, R2+Rb) for an action channel p(a|x).
BroadcastRegionPoint eval_broadcast_lossless(const BroadcastModel& m, const ConditionalChannel& action);

// Same bounds for a switching model, evaluated through the per-action
// decomposition H(X) - sum_a p_a I(X;W|A=a); agrees with
// eval_broadcast_lossless on the expanded switch channel.
BroadcastRegionPoint eval_switching(const SwitchingModel& m, const ConditionalChannel& action);

// Binary-symmetric worked example, evaluated as displayed in its source:
// bounds (I(X;A), 1 - q H(delta), 1 - (1-q) H(delta)) with unit action cost.
// The stated sum-rate bounds do not coincide with eval_switching on the same
// instance; see the acceptance suite and README for the discrepancy analysis.
BroadcastRegionPoint eval_bsc_closed_form(double q, double delta);

// S-channel worked example with action p(A=1|X=0)=alpha, p(A=1|X=1)=beta and
// costs (inf, 1, 0, inf); boundary-degenerate alphas are evaluated by limits.
BroadcastRegionPoint eval_schannel_closed_form(double alpha, double beta, double delta);

// switching action channel over actions {1,2}: alpha = p(A=1|x=0), beta = p(A=1|x=1)
ConditionalChannel switching_action_channel(const SwitchingModel& m, double alpha, double beta);

enum class SumrateMode { optimal, greedy };

struct SweepGrid {
  int coarse = 200;  // step 1/coarse on each axis
  int fine = 2000;   // one refinement pass around the incumbent
};

struct SumrateResult {
  bool feasible = false;
  double value = 0.0;
  double alpha = 0.0, beta = 0.0;
};

// Minimum of max(R1+Rb bound - Rb, 0) + eta * max(R2+Rb bound - Rb, 0) over
// the (alpha, beta) action grid, subject to the action-cost budget and to
// I(X;A) <= Rb.  Greedy mode restricts alpha = beta; its candidate set is a
// subset of the optimal one at every stage, so greedy >= optimal holds
// exactly.
SumrateResult weighted_sumrate(const SwitchingModel& m, double eta, double rb, double gamma, SumrateMode mode,
                               const SweepGrid& grid = {});

// Common-reconstruction bounds for a degraded model; rejects models without
// the degraded flag.
BroadcastRegionPoint eval_cr_point(const BroadcastModel& m, const CRTestChannel& t);

struct BroadcastWeights {
  double w1 = 1.0, w2 = 1.0, wb = 1.0;
};

struct CROptimizeResult {
  bool feasible = false;
  BroadcastRegionPoint point;
  RateTriple rates;
  std::optional<CRTestChannel> channel;
};

CROptimizeResult optimize_cr(const BroadcastModel& m, const CostBudget& cost_budget,
                             const DistortionBudget& dist_budget, const BroadcastWeights& weights,
                             const SearchConfig& cfg);

}  // namespace casvm

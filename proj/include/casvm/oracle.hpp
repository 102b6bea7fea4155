#pragma once

// Independent brute-force implementations used only to cross-validate the
// region evaluators and optimizers.  Nothing here reuses the main evaluation
// path: information terms come from definitional double summations and region
// search is exhaustive over quantized channels.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casvm/broadcast.hpp"
#include "casvm/cascade.hpp"
#include "casvm/model.hpp"

namespace casvm::oracle {

// I(a;b|given) by direct summation of p log p p / (p p); no entropy
// decomposition, no clamping tricks beyond the final max with zero.
double mi_oracle(const JointDistribution& d, std::span<const std::string> a, std::span<const std::string> b,
                 std::span<const std::string> given);
double mi_oracle(const JointDistribution& d, std::initializer_list<std::string> a,
                 std::initializer_list<std::string> b, std::initializer_list<std::string> given);

struct GridSpec {
  double step = 0.5;                       // simplex quantization step, in (0, 0.5]
  std::size_t u_size = 2;                  // auxiliary alphabet cap for cascade channels
  std::uint64_t max_channels = 20000000;   // refuse larger enumerations

  std::size_t denominator() const;  // 1/step, validated
};

// Number of quantized channels the cascade enumeration would visit.
std::uint64_t cascade_enumeration_size(const CascadeModel& m, const GridSpec& grid);
std::uint64_t cr_enumeration_size(const BroadcastModel& m, const GridSpec& grid);

struct CascadeOracleResult {
  bool feasible = false;
  double objective = 0.0;  // r1 + eta * r2 at the best feasible channel
  RegionPoint point;
};

// Exhaustive search over step-quantized test channels; the decode table is
// optimized exactly for each channel.  Throws when the enumeration exceeds
// grid.max_channels, with the size estimate in the message.
CascadeOracleResult brute_force_cascade(const CascadeModel& m, const CostBudget& cost_budget,
                                        const DistortionBudget& dist_budget, double eta, const GridSpec& grid);

struct CROracleResult {
  bool feasible = false;
  double objective = 0.0;
  BroadcastRegionPoint point;
  RateTriple rates;
};

CROracleResult brute_force_cr(const BroadcastModel& m, const CostBudget& cost_budget,
                              const DistortionBudget& dist_budget, const BroadcastWeights& weights,
                              const GridSpec& grid);

}  // namespace casvm::oracle

#pragma once

// Network model descriptions: the cascade topology with a controllable
// side-information channel at the end node, the cascade-broadcast topology
// with the channel at both downstream nodes, and the switching special case.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "casvm/prob.hpp"

namespace casvm {

// Action costs may be infinite; such actions are forbidden and any feasible
// action distribution must give them zero probability.  Keeping the sentinel
// explicit avoids inf*0 arithmetic.
inline constexpr double kForbiddenCost = std::numeric_limits<double>::infinity();
inline bool is_forbidden_cost(double c) { return std::isinf(c); }

struct CostTable {
  std::vector<double> lambda;  // one entry per action symbol, >= 0 or forbidden

  double max_finite() const;
  double min_finite() const;  // throws if every action is forbidden
};

// d(x, xhat) >= 0, dense |X| x |Xhat| row-major.
struct DistortionTable {
  std::size_t source_size = 0;
  std::size_t recon_size = 0;
  std::vector<double> d;

  double at(std::size_t x, std::size_t xhat) const { return d[x * recon_size + xhat]; }
  double max_entry() const;
  static DistortionTable hamming(std::size_t n);
};

struct CostBudget {
  double gamma = std::numeric_limits<double>::infinity();
};

struct DistortionBudget {
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
};

// Cascade topology: Node 1 sees (X,Y), Node 2 sees Y, Node 3 controls the
// side-information channel p(z|a,y) through its action A.
struct CascadeModel {
  JointDistribution source;  // over (X, Y)
  ConditionalChannel vm;     // Z given (A, Y)
  CostTable cost;
  DistortionTable d1;  // X x Xhat1
  DistortionTable d2;  // X x Xhat2

  const Alphabet& x() const { return source.variables()[0]; }
  const Alphabet& y() const { return source.variables()[1]; }
  const Alphabet& a() const { return vm.from()[0]; }
  const Alphabet& z() const { return vm.to()[0]; }
};

// Cascade-broadcast topology: source X at Node 1, actions driven by the
// broadcast message, both side-information sequences produced by p(y,z|a,x).
struct BroadcastModel {
  JointDistribution source;  // over (X)
  ConditionalChannel vm;     // (Y, Z) given (A, X)
  CostTable cost;
  DistortionTable d1;
  DistortionTable d2;
  bool degraded = false;  // asserts p(y,z|a,x) = p(y|a,x) p(z|y,a)

  const Alphabet& x() const { return source.variables()[0]; }
  const Alphabet& a() const { return vm.from()[0]; }
  const Alphabet& y() const { return vm.to()[0]; }
  const Alphabet& z() const { return vm.to()[1]; }
};

// Switching side information: action j in {0,1,2,3} routes the hidden
// sequence W to neither, Node 2, Node 3, or both; unrouted observations read
// an erasure symbol appended to W's alphabet.
struct SwitchingModel {
  JointDistribution source_pair;  // over (X, W)
  std::array<double, 4> lambdas = {0, 0, 0, 0};

  const Alphabet& x() const { return source_pair.variables()[0]; }
  const Alphabet& w() const { return source_pair.variables()[1]; }
  std::size_t erasure_symbol() const { return w().size; }  // index |W| in Y/Z alphabets
};

// Validation checks every structural invariant and throws std::invalid_argument
// on failure; the returned model is the (renormalized) input.   Idempotent.
CascadeModel validate(CascadeModel m);
BroadcastModel validate(BroadcastModel m);
SwitchingModel validate(SwitchingModel m);

// Largest deviation of p(y,z|a,x) from a p(y|a,x) p(z|y,a) factorization.
double degradedness_residual(const ConditionalChannel& vm);

// E[Lambda(A)]; +infinity when a forbidden action carries probability mass.
double expected_cost(const JointDistribution& joint, const std::string& action_var, const CostTable& cost);

double expected_distortion(const JointDistribution& joint, const DistortionTable& table,
                           const std::string& source_var, const std::string& recon_var);

// p(y,z|a,x) for a switching model, as an explicit channel over the expanded
// (Y, Z) alphabets; used to hand switching instances to the generic
// cascade-broadcast evaluator.
ConditionalChannel expand_switching_channel(const SwitchingModel& m);

// Lossless broadcast view of a switching model (Hamming distortions, erasure
// alphabets); convenient for cross-evaluator checks.
BroadcastModel switching_to_broadcast(const SwitchingModel& m);

}  // namespace casvm

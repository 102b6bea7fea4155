#include "casvm/broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace casvm {

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kA = {"a"};
const std::vector<std::string> kAY = {"a", "y"};
const std::vector<std::string> kAZ = {"a", "z"};
const std::vector<std::string> kNone = {};
const std::vector<std::string> kX12 = {"xh1", "xh2"};
const std::vector<std::string> kX1 = {"xh1"};
const std::vector<std::string> kX2 = {"xh2"};
const std::vector<std::string> kAYX2 = {"a", "y", "xh2"};

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

void check_action_channel(const BroadcastModel& m, const ConditionalChannel& action) {
  if (action.from().size() != 1 || action.to().size() != 1 || action.from()[0].size != m.x().size ||
      action.to()[0].size != m.a().size)
    throw std::invalid_argument("broadcast evaluation needs an action channel p(a|x)");
}

JointDistribution broadcast_joint(const BroadcastModel& m, const ConditionalChannel& action) {
  const std::size_t nx = m.x().size, na = m.a().size, ny = m.y().size, nz = m.z().size;
  std::vector<double> mass(nx * na * ny * nz, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const double px = m.source.mass()[x];
    if (px == 0.0) continue;
    const auto as = action.slice(x);
    for (std::size_t a = 0; a < na; ++a) {
      const double pxa = px * as[a];
      if (pxa == 0.0) continue;
      const auto vs = m.vm.slice(a * nx + x);
      const std::size_t base = (x * na + a) * ny * nz;
      for (std::size_t yz = 0; yz < ny * nz; ++yz) mass[base + yz] = pxa * vs[yz];
    }
  }
  return JointDistribution({{"x", nx}, {"a", na}, {"y", ny}, {"z", nz}}, std::move(mass));
}

// entropy terms shared by the lossless bounds: I(X;A), H(X|A,Y), H(X|A,Z)
struct LosslessTerms {
  double i_xa, h_x_ay, h_x_az;
};

LosslessTerms lossless_terms(const JointDistribution& joint) {
  LosslessTerms t{};
  t.i_xa = conditional_mutual_information(joint, kX, kA, kNone);
  t.h_x_ay = entropy(joint, {"x", "a", "y"}) - entropy(joint, {"a", "y"});
  t.h_x_az = entropy(joint, {"x", "a", "z"}) - entropy(joint, {"a", "z"});
  return t;
}

}  // namespace

RateTriple canonical_rate_triple(const BroadcastRegionPoint& p) {
  RateTriple t;
  t.rb = p.rb_min;
  t.r1 = std::max(0.0, p.r1_plus_rb_min - t.rb);
  t.r2 = std::max(0.0, p.r2_plus_rb_min - t.rb);
  if (p.r_sum_min) t.r2 = std::max(t.r2, *p.r_sum_min - t.rb - t.r1);
  return t;
}

BroadcastRegionPoint eval_broadcast_lossless(const BroadcastModel& m, const ConditionalChannel& action) {
  check_action_channel(m, action);
  const auto joint = broadcast_joint(m, action);
  const auto t = lossless_terms(joint);
  BroadcastRegionPoint p;
  p.rb_min = t.i_xa;
  p.r1_plus_rb_min = t.i_xa + t.h_x_ay;
  p.r2_plus_rb_min = t.i_xa + t.h_x_az;
  p.cost = expected_cost(joint, "a", m.cost);
  return p;
}

ConditionalChannel switching_action_channel(const SwitchingModel& m, double alpha, double beta) {
  if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1)
    throw std::invalid_argument("switching action probabilities must lie in [0,1]");
  if (m.x().size != 2) throw std::invalid_argument("(alpha, beta) action channels need a binary source");
  return ConditionalChannel({{"x", 2}}, {{"a", 4}},
                            {0.0, alpha, 1.0 - alpha, 0.0, 0.0, beta, 1.0 - beta, 0.0});
}

BroadcastRegionPoint eval_switching(const SwitchingModel& m, const ConditionalChannel& action) {
  if (action.from().size() != 1 || action.to().size() != 1 || action.from()[0].size != m.x().size ||
      action.to()[0].size != 4)
    throw std::invalid_argument("switching evaluation needs an action channel p(a|x) over 4 actions");

  const std::size_t nx = m.x().size, nw = m.w().size;
  const auto& pxw = m.source_pair.mass();
  std::vector<double> px(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t w = 0; w < nw; ++w) px[x] += pxw[x * nw + w];

  double h_x = 0.0;
  for (double v : px)
    if (v > 0.0) h_x -= v * std::log2(v);

  // per-action mass and I(X;W|A=a) under the tilted conditional pair
  double pa[4] = {0, 0, 0, 0};
  double i_xw_a[4] = {0, 0, 0, 0};
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t x = 0; x < nx; ++x) pa[a] += px[x] * action.slice(x)[a];
    if (pa[a] <= 0.0) continue;
    std::vector<double> cond(nx * nw, 0.0), cx(nx, 0.0), cw(nw, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t w = 0; w < nw; ++w) cond[x * nw + w] = pxw[x * nw + w] * action.slice(x)[a] / pa[a];
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t w = 0; w < nw; ++w) {
        cx[x] += cond[x * nw + w];
        cw[w] += cond[x * nw + w];
      }
    double mi = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t w = 0; w < nw; ++w) {
        const double p = cond[x * nw + w];
        if (p > 0.0) mi += p * std::log2(p / (cx[x] * cw[w]));
      }
    i_xw_a[a] = std::max(mi, 0.0);
  }

  // I(X;A) computed exactly from the action channel; the worked examples
  // state Rb >= 0 because their action choices are independent of X.
  double h_a = 0.0, h_a_x = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    if (pa[a] > 0.0) h_a -= pa[a] * std::log2(pa[a]);
  for (std::size_t x = 0; x < nx; ++x) {
    const auto s = action.slice(x);
    for (std::size_t a = 0; a < 4; ++a)
      if (s[a] > 0.0) h_a_x -= px[x] * s[a] * std::log2(s[a]);
  }

  BroadcastRegionPoint p;
  p.rb_min = std::max(h_a - h_a_x, 0.0);
  p.r1_plus_rb_min = h_x - pa[1] * i_xw_a[1] - pa[3] * i_xw_a[3];
  p.r2_plus_rb_min = h_x - pa[2] * i_xw_a[2] - pa[3] * i_xw_a[3];
  double cost = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    if (pa[a] <= 1e-12) continue;
    if (is_forbidden_cost(m.lambdas[a])) {
      cost = kForbiddenCost;
      break;
    }
    cost += pa[a] * m.lambdas[a];
  }
  p.cost = cost;
  return p;
}

BroadcastRegionPoint eval_bsc_closed_form(double q, double delta) {
  if (q < 0 || q > 1 || delta < 0 || delta > 1) throw std::invalid_argument("q and delta must lie in [0,1]");
  BroadcastRegionPoint p;
  p.rb_min = 0.0;  // the action draw is independent of X, so I(X;A) = 0
  p.r1_plus_rb_min = 1.0 - q * binary_entropy(delta);
  p.r2_plus_rb_min = 1.0 - (1.0 - q) * binary_entropy(delta);
  p.cost = 1.0;  // both usable actions cost 1
  return p;
}

BroadcastRegionPoint eval_schannel_closed_form(double alpha, double beta, double delta) {
  if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1 || delta < 0 || delta > 1)
    throw std::invalid_argument("alpha, beta, delta must lie in [0,1]");
  const double p1 = (alpha + beta) / 2.0;
  const double p2 = 1.0 - p1;
  const double hd = binary_entropy(delta);

  BroadcastRegionPoint p;
  p.rb_min = std::max(binary_entropy(p1) - (binary_entropy(alpha) + binary_entropy(beta)) / 2.0, 0.0);
  // terms with zero action mass carry zero weight; their limits are finite
  p.r1_plus_rb_min = 1.0;
  if (p1 > 0.0) {
    const double frac = alpha / (alpha + beta);
    p.r1_plus_rb_min = 1.0 - p1 * (binary_entropy((1.0 - delta) * frac) - hd * frac);
  }
  p.r2_plus_rb_min = 1.0;
  if (p2 > 0.0) {
    const double frac = (1.0 - alpha) / (2.0 - alpha - beta);
    p.r2_plus_rb_min = 1.0 - p2 * (binary_entropy((1.0 - delta) * frac) - hd * frac);
  }
  p.cost = p1;  // lambda = (inf, 1, 0, inf)
  return p;
}

namespace {

struct SweepPoint {
  bool feasible = false;
  double value = 0.0;
  double g1 = 0.0, g2 = 0.0;
};

SweepPoint sweep_eval(const SwitchingModel& m, double alpha, double beta, double eta, double rb, double gamma) {
  const auto p = eval_switching(m, switching_action_channel(m, alpha, beta));
  SweepPoint s;
  s.feasible = p.cost <= gamma + 1e-12 && p.rb_min <= rb + 1e-12;
  s.g1 = std::max(p.r1_plus_rb_min - rb, 0.0);
  s.g2 = std::max(p.r2_plus_rb_min - rb, 0.0);
  s.value = s.g1 + eta * s.g2;
  return s;
}

struct Incumbent {
  bool found = false;
  double value = 0.0;
  double alpha = 0.0, beta = 0.0;

  void offer(double v, double a, double b) {
    if (!found || v < value - 1e-15) {
      found = true;
      value = v;
      alpha = a;
      beta = b;
    }
  }
};

void refine_square(const SwitchingModel& m, double eta, double rb, double gamma, const SweepGrid& grid,
                   double ca, double cb, bool diagonal_only, Incumbent& inc) {
  const double coarse_step = 1.0 / grid.coarse;
  const int lo_a = std::max(0, static_cast<int>(std::llround((ca - coarse_step) * grid.fine)));
  const int hi_a = std::min(grid.fine, static_cast<int>(std::llround((ca + coarse_step) * grid.fine)));
  const int lo_b = std::max(0, static_cast<int>(std::llround((cb - coarse_step) * grid.fine)));
  const int hi_b = std::min(grid.fine, static_cast<int>(std::llround((cb + coarse_step) * grid.fine)));
  for (int i = lo_a; i <= hi_a; ++i) {
    const double a = static_cast<double>(i) / grid.fine;
    for (int j = lo_b; j <= hi_b; ++j) {
      if (diagonal_only && i != j) continue;
      const double b = static_cast<double>(j) / grid.fine;
      const auto s = sweep_eval(m, a, b, eta, rb, gamma);
      if (s.feasible) inc.offer(s.value, a, b);
    }
  }
}

}  // namespace

SumrateResult weighted_sumrate(const SwitchingModel& m, double eta, double rb, double gamma, SumrateMode mode,
                               const SweepGrid& grid) {
  if (eta < 0 || rb < 0) throw std::invalid_argument("eta and rb must be >= 0");
  if (grid.coarse < 1 || grid.fine < grid.coarse) throw std::invalid_argument("bad sweep grid");

  const bool greedy = mode == SumrateMode::greedy;
  Incumbent best;       // over the scanned set
  Incumbent best_diag;  // best diagonal point, always tracked
  for (int i = 0; i <= grid.coarse; ++i) {
    const double a = static_cast<double>(i) / grid.coarse;
    for (int j = 0; j <= grid.coarse; ++j) {
      if (greedy && i != j) continue;
      const double b = static_cast<double>(j) / grid.coarse;
      const auto s = sweep_eval(m, a, b, eta, rb, gamma);
      if (!s.feasible) continue;
      best.offer(s.value, a, b);
      if (i == j) best_diag.offer(s.value, a, b);
    }
  }
  SumrateResult out;
  if (!best.found) return out;

  // One refinement pass around the incumbent.  Optimal mode also refines the
  // diagonal incumbent's neighborhood, so its candidate set always contains
  // the greedy one.
  Incumbent refined = best;
  refine_square(m, eta, rb, gamma, grid, best.alpha, best.beta, greedy, refined);
  if (!greedy && best_diag.found)
    refine_square(m, eta, rb, gamma, grid, best_diag.alpha, best_diag.beta, false, refined);

  out.feasible = true;
  out.value = refined.value;
  out.alpha = refined.alpha;
  out.beta = refined.beta;
  return out;
}

BroadcastRegionPoint eval_cr_point(const BroadcastModel& m, const CRTestChannel& t) {
  if (!m.degraded)
    throw std::invalid_argument("common-reconstruction evaluation requires a degraded model");
  check_action_channel(m, t.action);
  if (t.recon.from().size() != 2 || t.recon.to().size() != 2 ||
      t.recon.from()[0].size != m.x().size || t.recon.from()[1].size != m.a().size ||
      t.recon.to()[0].size != m.d1.recon_size || t.recon.to()[1].size != m.d2.recon_size)
    throw std::invalid_argument("reconstruction channel must be p(xh1,xh2|x,a)");

  const std::size_t nx = m.x().size, na = m.a().size, ny = m.y().size, nz = m.z().size;
  const std::size_t n1 = m.d1.recon_size, n2 = m.d2.recon_size;

  // p(x) p(a|x) p(y,z|a,x) p(xh1,xh2|x,a); under degradedness this equals the
  // factorization through p(y|x,a) p(z|a,y)
  std::vector<double> mass(nx * na * ny * nz * n1 * n2, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const double px = m.source.mass()[x];
    if (px == 0.0) continue;
    const auto as = t.action.slice(x);
    for (std::size_t a = 0; a < na; ++a) {
      const double pxa = px * as[a];
      if (pxa == 0.0) continue;
      const auto vs = m.vm.slice(a * nx + x);
      const auto rs = t.recon.slice(x * na + a);
      for (std::size_t yz = 0; yz < ny * nz; ++yz) {
        const double pyz = pxa * vs[yz];
        if (pyz == 0.0) continue;
        const std::size_t base = ((x * na + a) * ny * nz + yz) * n1 * n2;
        for (std::size_t r = 0; r < n1 * n2; ++r) mass[base + r] = pyz * rs[r];
      }
    }
  }
  JointDistribution joint(
      {{"x", nx}, {"a", na}, {"y", ny}, {"z", nz}, {"xh1", n1}, {"xh2", n2}}, std::move(mass));

  const double i_xa = conditional_mutual_information(joint, kX, kA, kNone);
  const double i_x12_ay = conditional_mutual_information(joint, kX, kX12, kAY);
  const double i_x2_az = conditional_mutual_information(joint, kX, kX2, kAZ);
  const double i_x1_ay2 = conditional_mutual_information(joint, kX, kX1, kAYX2);

  BroadcastRegionPoint p;
  p.rb_min = i_xa;
  p.r1_plus_rb_min = i_xa + i_x12_ay;
  p.r2_plus_rb_min = i_xa + i_x2_az;
  p.r_sum_min = i_xa + i_x2_az + i_x1_ay2;
  p.cost = expected_cost(joint, "a", m.cost);
  p.d1 = expected_distortion(joint, m.d1, "x", "xh1");
  p.d2 = expected_distortion(joint, m.d2, "x", "xh2");
  return p;
}

CROptimizeResult optimize_cr(const BroadcastModel& m, const CostBudget& cost_budget,
                             const DistortionBudget& dist_budget, const BroadcastWeights& weights,
                             const SearchConfig& cfg) {
  if (weights.w1 < 0 || weights.w2 < 0 || weights.wb < 0)
    throw std::invalid_argument("weights must be >= 0");
  CROptimizeResult result;
  if (m.cost.min_finite() > cost_budget.gamma + 1e-9) return result;

  const std::size_t nx = m.x().size, na = m.a().size;
  const std::size_t n1 = m.d1.recon_size, n2 = m.d2.recon_size;

  SimplexBlock action_block;
  action_block.cells = nx;
  action_block.outcomes = na;
  action_block.allowed.assign(na, true);
  for (std::size_t a = 0; a < na; ++a)
    if (is_forbidden_cost(m.cost.lambda[a])) action_block.allowed[a] = false;

  SimplexBlock recon_block;
  recon_block.cells = nx * na;
  recon_block.outcomes = n1 * n2;

  const std::size_t action_size = nx * na;
  auto make_channel = [&](const std::vector<double>& point) {
    std::vector<double> am(point.begin(), point.begin() + action_size);
    std::vector<double> rm(point.begin() + action_size, point.end());
    return CRTestChannel{
        ConditionalChannel({{"x", nx}}, {{"a", na}}, std::move(am)),
        ConditionalChannel({{"x", nx}, {"a", na}}, {{"xh1", n1}, {"xh2", n2}}, std::move(rm))};
  };

  const auto eval = [&](const std::vector<double>& point) {
    const CRTestChannel t = make_channel(point);
    const BroadcastRegionPoint p = eval_cr_point(m, t);
    const RateTriple r = canonical_rate_triple(p);
    SearchEval e;
    e.objective = weights.w1 * r.r1 + weights.w2 * r.r2 + weights.wb * r.rb;
    e.violation = std::max(0.0, *p.d1 - dist_budget.d1) + std::max(0.0, *p.d2 - dist_budget.d2) +
                  std::max(0.0, p.cost - cost_budget.gamma);
    e.cost = p.cost;
    return e;
  };

  const SearchOutcome out = simplex_product_search({action_block, recon_block}, eval, cfg);
  if (!out.feasible) return result;

  result.feasible = true;
  result.channel = make_channel(out.point);
  result.point = eval_cr_point(m, *result.channel);
  result.rates = canonical_rate_triple(result.point);
  return result;
}

}  // namespace casvm

#include "casvm/cascade.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace casvm {

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kY = {"y"};
const std::vector<std::string> kA = {"a"};
const std::vector<std::string> kU = {"u"};
const std::vector<std::string> kAZ = {"a", "z"};
const std::vector<std::string> kDesc = {"xh1", "a", "u"};

void check_test_channel(const CascadeModel& m, const ConditionalChannel& ch) {
  if (ch.from().size() != 2 || ch.to().size() != 3)
    throw std::invalid_argument("cascade test channel must be p(xh1,a,u|x,y)");
  if (ch.from()[0].size != m.x().size || ch.from()[1].size != m.y().size)
    throw std::invalid_argument("test channel conditioning alphabets do not match the model");
  if (ch.to()[0].size != m.d1.recon_size) throw std::invalid_argument("xh1 alphabet does not match d1");
  if (ch.to()[1].size != m.a().size) throw std::invalid_argument("action alphabet does not match the model");
  // sizes beyond cascade_u_bound(m) never help, but evaluating them is legal
  // (the sufficiency experiments do exactly that)
}

}  // namespace

std::size_t cascade_u_bound(const CascadeModel& m) { return m.x().size * m.y().size * m.a().size + 3; }

JointDistribution cascade_joint(const CascadeModel& m, const ConditionalChannel& ch) {
  check_test_channel(m, ch);
  const std::size_t nx = m.x().size, ny = m.y().size, nz = m.z().size;
  const std::size_t n1 = ch.to()[0].size, na = ch.to()[1].size, nu = ch.to()[2].size;
  const std::size_t desc = n1 * na * nu;

  std::vector<double> mass(nx * ny * desc * nz, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double ps = m.source.mass()[x * ny + y];
      if (ps == 0.0) continue;
      const auto cs = ch.slice(x * ny + y);
      for (std::size_t d = 0; d < desc; ++d) {
        const double pd = ps * cs[d];
        if (pd == 0.0) continue;
        const std::size_t a = (d / nu) % na;
        const auto vs = m.vm.slice(a * ny + y);
        const std::size_t base = ((x * ny + y) * desc + d) * nz;
        for (std::size_t z = 0; z < nz; ++z) mass[base + z] = pd * vs[z];
      }
    }
  }
  std::vector<Alphabet> vars = {{"x", nx}, {"y", ny}, {"xh1", n1}, {"a", na}, {"u", nu}, {"z", nz}};
  return JointDistribution(std::move(vars), std::move(mass));
}

std::vector<std::size_t> optimal_cascade_decode(const CascadeModel& m, const ConditionalChannel& ch) {
  const auto joint = cascade_joint(m, ch);
  const std::size_t idx[] = {joint.index_of("x"), joint.index_of("u"), joint.index_of("z")};
  const auto pxuz = joint.marginal(idx);
  const std::size_t nx = m.x().size, nu = ch.to()[2].size, nz = m.z().size, n2 = m.d2.recon_size;

  std::vector<std::size_t> decode(nu * nz, 0);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t z = 0; z < nz; ++z) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_r = 0;
      for (std::size_t r = 0; r < n2; ++r) {
        double v = 0.0;
        for (std::size_t x = 0; x < nx; ++x) v += pxuz[(x * nu + u) * nz + z] * m.d2.at(x, r);
        if (v < best - 1e-15) {
          best = v;
          best_r = r;
        }
      }
      decode[u * nz + z] = best_r;
    }
  }
  return decode;
}

RegionPoint eval_cascade_point(const CascadeModel& m, const CascadeTestChannel& t) {
  const std::size_t nu = t.ch.to()[2].size, nz = m.z().size;
  if (t.decode.size() != nu * nz) throw std::invalid_argument("decode table must cover U x Z");
  for (std::size_t r : t.decode)
    if (r >= m.d2.recon_size) throw std::invalid_argument("decode value out of range");

  const auto joint = cascade_joint(m, t.ch);

  RegionPoint p;
  p.r1_min = conditional_mutual_information(joint, kX, kDesc, kY);
  p.r2_min = conditional_mutual_information(joint, kXY, kA, {}) +
             conditional_mutual_information(joint, kXY, kU, kAZ);
  p.d1 = expected_distortion(joint, m.d1, "x", "xh1");

  const std::size_t idx[] = {joint.index_of("x"), joint.index_of("u"), joint.index_of("z")};
  const auto pxuz = joint.marginal(idx);
  double d2 = 0.0;
  for (std::size_t x = 0; x < m.x().size; ++x)
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t z = 0; z < nz; ++z) d2 += pxuz[(x * nu + u) * nz + z] * m.d2.at(x, t.decode[u * nz + z]);
  p.d2 = d2;
  p.cost = expected_cost(joint, "a", m.cost);
  return p;
}

RegionPoint eval_cascade_lossless(const CascadeModel& m, const ConditionalChannel& action) {
  if (action.from().size() != 2 || action.to().size() != 1 || action.to()[0].size != m.a().size ||
      action.from()[0].size != m.x().size || action.from()[1].size != m.y().size)
    throw std::invalid_argument("lossless cascade needs an action channel p(a|x,y)");

  const std::size_t nx = m.x().size, ny = m.y().size, na = m.a().size, nz = m.z().size;
  std::vector<double> mass(nx * ny * na * nz, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const double ps = m.source.mass()[x * ny + y];
      if (ps == 0.0) continue;
      const auto as = action.slice(x * ny + y);
      for (std::size_t a = 0; a < na; ++a) {
        const auto vs = m.vm.slice(a * ny + y);
        for (std::size_t z = 0; z < nz; ++z) mass[((x * ny + y) * na + a) * nz + z] = ps * as[a] * vs[z];
      }
    }
  JointDistribution joint({{"x", nx}, {"y", ny}, {"a", na}, {"z", nz}}, std::move(mass));

  RegionPoint p;
  // I(X;A|Y) + H(X|A,Y)
  p.r1_min = conditional_mutual_information(joint, kX, kA, kY) + entropy(joint, {"x", "a", "y"}) -
             entropy(joint, {"a", "y"});
  // I(X,Y;A) + H(X|A,Z)
  p.r2_min = conditional_mutual_information(joint, kXY, kA, {}) + entropy(joint, {"x", "a", "z"}) -
             entropy(joint, {"a", "z"});
  p.d1 = 0.0;
  p.d2 = 0.0;
  p.cost = expected_cost(joint, "a", m.cost);
  return p;
}

namespace {

// Flat-table evaluation of one test channel, shaped for the optimizer's
// inner loop: one joint build, single-pass reductions, no joint-distribution
// object churn.  Agreement with eval_cascade_point is covered by tests.
class FastCascadeEval {
 public:
  FastCascadeEval(const CascadeModel& m, std::size_t nu)
      : m_(m),
        nx_(m.x().size),
        ny_(m.y().size),
        n1_(m.d1.recon_size),
        na_(m.a().size),
        nu_(nu),
        nz_(m.z().size),
        desc_(n1_ * na_ * nu_) {}

  RegionPoint operator()(const std::vector<double>& channel) const {
    // workspace reused across calls; one set per thread, since the optimizer
    // evaluates concurrently from independent starts
    thread_local std::vector<double> xydz, xyd, xyauz, yd, xy, y, xyaz, azu, xuz, az, xya, a_marg;

    // p(x, y, d, z) with d = (xh1, a, u); z factored through the model channel
    xydz.assign(nx_ * ny_ * desc_ * nz_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) {
        const double ps = m_.source.mass()[x * ny_ + y];
        if (ps == 0.0) continue;
        const std::size_t cell = (x * ny_ + y) * desc_;
        for (std::size_t d = 0; d < desc_; ++d) {
          const double pd = ps * channel[cell + d];
          if (pd == 0.0) continue;
          const auto vs = m_.vm.slice(((d / nu_) % na_) * ny_ + y);
          const std::size_t base = (cell + d) * nz_;
          for (std::size_t z = 0; z < nz_; ++z) xydz[base + z] += pd * vs[z];
        }
      }

    // reductions
    xyd.assign(nx_ * ny_ * desc_, 0.0);
    xyauz.assign(nx_ * ny_ * na_ * nu_ * nz_, 0.0);
    for (std::size_t xy = 0; xy < nx_ * ny_; ++xy)
      for (std::size_t d = 0; d < desc_; ++d) {
        const std::size_t a = (d / nu_) % na_, u = d % nu_;
        const std::size_t base = (xy * desc_ + d) * nz_;
        double sum = 0.0;
        for (std::size_t z = 0; z < nz_; ++z) {
          const double v = xydz[base + z];
          sum += v;
          xyauz[((xy * na_ + a) * nu_ + u) * nz_ + z] += v;
        }
        xyd[xy * desc_ + d] += sum;
      }

    yd.assign(ny_ * desc_, 0.0);
    xy.assign(nx_ * ny_, 0.0);
    y.assign(ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t yy = 0; yy < ny_; ++yy)
        for (std::size_t d = 0; d < desc_; ++d) {
          const double v = xyd[(x * ny_ + yy) * desc_ + d];
          yd[yy * desc_ + d] += v;
          xy[x * ny_ + yy] += v;
        }
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t yy = 0; yy < ny_; ++yy) y[yy] += xy[x * ny_ + yy];

    xyaz.assign(nx_ * ny_ * na_ * nz_, 0.0);
    azu.assign(na_ * nu_ * nz_, 0.0);
    xuz.assign(nx_ * nu_ * nz_, 0.0);
    for (std::size_t xy_i = 0; xy_i < nx_ * ny_; ++xy_i)
      for (std::size_t a = 0; a < na_; ++a)
        for (std::size_t u = 0; u < nu_; ++u)
          for (std::size_t z = 0; z < nz_; ++z) {
            const double v = xyauz[((xy_i * na_ + a) * nu_ + u) * nz_ + z];
            xyaz[(xy_i * na_ + a) * nz_ + z] += v;
            azu[(a * nz_ + z) * nu_ + u] += v;
            xuz[((xy_i / ny_) * nu_ + u) * nz_ + z] += v;
          }
    az.assign(na_ * nz_, 0.0);
    xya.assign(nx_ * ny_ * na_, 0.0);
    a_marg.assign(na_, 0.0);
    for (std::size_t xy_i = 0; xy_i < nx_ * ny_; ++xy_i)
      for (std::size_t a = 0; a < na_; ++a)
        for (std::size_t z = 0; z < nz_; ++z) {
          const double v = xyaz[(xy_i * na_ + a) * nz_ + z];
          az[a * nz_ + z] += v;
          xya[xy_i * na_ + a] += v;
        }
    for (std::size_t a = 0; a < na_; ++a)
      for (std::size_t z = 0; z < nz_; ++z) a_marg[a] += az[a * nz_ + z];

    const auto ent = [](const std::vector<double>& t) {
      double h = 0.0;
      for (const double v : t)
        if (v > 0.0) h -= v * std::log2(v);
      return h;
    };

    RegionPoint p;
    const double h_xy = ent(xy), h_y = ent(y);
    p.r1_min = std::max(h_xy + ent(yd) - ent(xyd) - h_y, 0.0);
    const double i_xy_a = std::max(h_xy + ent(a_marg) - ent(xya), 0.0);
    const double i_xy_u_az = std::max(ent(xyaz) + ent(azu) - ent(xyauz) - ent(az), 0.0);
    p.r2_min = i_xy_a + i_xy_u_az;

    // d1 over (x, xh1)
    double d1 = 0.0;
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t yy = 0; yy < ny_; ++yy)
        for (std::size_t d = 0; d < desc_; ++d)
          d1 += xyd[(x * ny_ + yy) * desc_ + d] * m_.d1.at(x, d / (na_ * nu_));
    p.d1 = d1;

    // exact decode per (u, z)
    double d2 = 0.0;
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t z = 0; z < nz_; ++z) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m_.d2.recon_size; ++r) {
          double v = 0.0;
          for (std::size_t x = 0; x < nx_; ++x) v += xuz[(x * nu_ + u) * nz_ + z] * m_.d2.at(x, r);
          best = std::min(best, v);
        }
        d2 += best;
      }
    p.d2 = d2;

    double cost = 0.0;
    for (std::size_t a = 0; a < na_; ++a)
      if (a_marg[a] > 1e-12) cost += a_marg[a] * (is_forbidden_cost(m_.cost.lambda[a]) ? 0.0 : m_.cost.lambda[a]);
    p.cost = cost;
    return p;
  }

 private:
  const CascadeModel& m_;
  std::size_t nx_, ny_, n1_, na_, nu_, nz_, desc_;
};

}  // namespace

CascadeOptimizeResult optimize_cascade(const CascadeModel& m, const CostBudget& cost_budget,
                                       const DistortionBudget& dist_budget, double eta,
                                       const SearchConfig& cfg) {
  if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  CascadeOptimizeResult result;
  if (m.cost.min_finite() > cost_budget.gamma + 1e-9) return result;  // no action mix can meet the budget

  const std::size_t nu = cfg.u_size > 0 ? cfg.u_size : cascade_u_bound(m);
  const std::size_t n1 = m.d1.recon_size, na = m.a().size;
  const std::size_t outcomes = n1 * na * nu;

  SimplexBlock block;
  block.cells = m.x().size * m.y().size;
  block.outcomes = outcomes;
  block.allowed.assign(outcomes, true);
  for (std::size_t d = 0; d < outcomes; ++d)
    if (is_forbidden_cost(m.cost.lambda[(d / nu) % na])) block.allowed[d] = false;

  const FastCascadeEval fast(m, nu);
  const auto eval = [&](const std::vector<double>& point) {
    const RegionPoint p = fast(point);
    SearchEval e;
    e.objective = p.r1_min + eta * p.r2_min;
    e.violation = std::max(0.0, p.d1 - dist_budget.d1) + std::max(0.0, p.d2 - dist_budget.d2) +
                  std::max(0.0, p.cost - cost_budget.gamma);
    e.cost = p.cost;
    return e;
  };

  // Wide auxiliary alphabets defeat both vertex enumeration and random
  // starts, so seed them with the best channel found over a two-symbol
  // auxiliary, zero-padded into the full space.
  std::vector<std::vector<double>> seeds;
  if (nu > 2 && m.d1.recon_size * na * 2 * block.cells <= 64) {
    SearchConfig inner = cfg;
    inner.u_size = 2;
    const auto warm = optimize_cascade(m, cost_budget, dist_budget, eta, inner);
    if (warm.feasible) {
      const auto& small_mass = warm.channel->ch.mass();
      const std::size_t small_desc = n1 * na * 2;
      std::vector<double> lifted(block.cells * outcomes, 0.0);
      for (std::size_t c = 0; c < block.cells; ++c)
        for (std::size_t d = 0; d < small_desc; ++d) {
          const std::size_t x1 = d / (na * 2), a = (d / 2) % na, u = d % 2;
          lifted[c * outcomes + (x1 * na + a) * nu + u] = small_mass[c * small_desc + d];
        }
      seeds.push_back(std::move(lifted));
    }
  }

  const SearchOutcome out = simplex_product_search({block}, eval, cfg, seeds);
  if (!out.feasible) return result;

  result.feasible = true;
  ConditionalChannel ch({{"x", m.x().size}, {"y", m.y().size}}, {{"xh1", n1}, {"a", na}, {"u", nu}},
                        out.point);
  result.channel = CascadeTestChannel{ch, optimal_cascade_decode(m, ch)};
  result.point = eval_cascade_point(m, *result.channel);
  return result;
}

}  // namespace casvm

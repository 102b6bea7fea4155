#include "casvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace casvm {

double CostTable::max_finite() const {
  double m = 0.0;
  for (double c : lambda)
    if (!is_forbidden_cost(c)) m = std::max(m, c);
  return m;
}

double CostTable::min_finite() const {
  double m = std::numeric_limits<double>::infinity();
  for (double c : lambda)
    if (!is_forbidden_cost(c)) m = std::min(m, c);
  if (std::isinf(m)) throw std::invalid_argument("every action is forbidden");
  return m;
}

double DistortionTable::max_entry() const {
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

DistortionTable DistortionTable::hamming(std::size_t n) {
  DistortionTable t;
  t.source_size = t.recon_size = n;
  t.d.assign(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) t.d[i * n + i] = 0.0;
  return t;
}

namespace {

void check_cost(const CostTable& cost, std::size_t action_size) {
  if (cost.lambda.size() != action_size)
    throw std::invalid_argument("cost table has " + std::to_string(cost.lambda.size()) + " entries for " +
                                std::to_string(action_size) + " actions");
  bool any_finite = false;
  for (double c : cost.lambda) {
    if (std::isnan(c) || c < 0.0) throw std::invalid_argument("action cost must be >= 0 or forbidden");
    if (!is_forbidden_cost(c)) any_finite = true;
  }
  if (!any_finite) throw std::invalid_argument("every action is forbidden");
}

void check_distortion(const DistortionTable& t, std::size_t source_size, const char* which) {
  if (t.source_size != source_size || t.recon_size == 0 || t.d.size() != t.source_size * t.recon_size)
    throw std::invalid_argument(std::string(which) + " distortion table has wrong shape");
  for (double v : t.d)
    if (std::isnan(v) || v < 0.0 || std::isinf(v))
      throw std::invalid_argument(std::string(which) + " distortion entries must be finite and >= 0");
}

}  // namespace

double degradedness_residual(const ConditionalChannel& vm) {
  // vm: (Y,Z) given (A,X).  For each (a,y) compare p(z|a,x,y) across the x
  // with p(y|a,x) bounded away from zero.
  const std::size_t na = vm.from()[0].size, nx = vm.from()[1].size;
  const std::size_t ny = vm.to()[0].size, nz = vm.to()[1].size;
  double residual = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      std::vector<double> reference;
      for (std::size_t x = 0; x < nx; ++x) {
        const auto s = vm.slice(a * nx + x);
        double py = 0.0;
        for (std::size_t z = 0; z < nz; ++z) py += s[y * nz + z];
        if (py <= 1e-12) continue;
        std::vector<double> cond(nz);
        for (std::size_t z = 0; z < nz; ++z) cond[z] = s[y * nz + z] / py;
        if (reference.empty()) {
          reference = cond;
        } else {
          for (std::size_t z = 0; z < nz; ++z) residual = std::max(residual, std::abs(cond[z] - reference[z]));
        }
      }
    }
  }
  return residual;
}

CascadeModel validate(CascadeModel m) {
  if (m.source.variables().size() != 2) throw std::invalid_argument("cascade source must be a joint over (X, Y)");
  if (m.vm.from().size() != 2 || m.vm.to().size() != 1)
    throw std::invalid_argument("cascade side-information channel must be p(z|a,y)");
  if (m.vm.from()[1].size != m.y().size || m.vm.from()[1].name != m.y().name)
    throw std::invalid_argument("side-information channel must condition on the model's Y");
  check_cost(m.cost, m.a().size);
  check_distortion(m.d1, m.x().size, "d1");
  check_distortion(m.d2, m.x().size, "d2");
  return m;
}

BroadcastModel validate(BroadcastModel m) {
  if (m.source.variables().size() != 1) throw std::invalid_argument("broadcast source must be a pmf over X");
  if (m.vm.from().size() != 2 || m.vm.to().size() != 2)
    throw std::invalid_argument("broadcast side-information channel must be p(y,z|a,x)");
  if (m.vm.from()[1].size != m.x().size || m.vm.from()[1].name != m.x().name)
    throw std::invalid_argument("side-information channel must condition on the model's X");
  check_cost(m.cost, m.a().size);
  check_distortion(m.d1, m.x().size, "d1");
  check_distortion(m.d2, m.x().size, "d2");
  if (m.degraded) {
    const double res = degradedness_residual(m.vm);
    if (res > kNormalizationTol)
      throw std::invalid_argument("model flagged degraded but factorization residual is " + std::to_string(res));
  }
  return m;
}

SwitchingModel validate(SwitchingModel m) {
  if (m.source_pair.variables().size() != 2)
    throw std::invalid_argument("switching source must be a joint over (X, W)");
  for (double c : m.lambdas)
    if (std::isnan(c) || c < 0.0) throw std::invalid_argument("action cost must be >= 0 or forbidden");
  if (std::all_of(m.lambdas.begin(), m.lambdas.end(), [](double c) { return is_forbidden_cost(c); }))
    throw std::invalid_argument("every action is forbidden");
  return m;
}

double expected_cost(const JointDistribution& joint, const std::string& action_var, const CostTable& cost) {
  const std::size_t ai = joint.index_of(action_var);
  if (joint.variables()[ai].size != cost.lambda.size())
    throw std::invalid_argument("cost table does not match action alphabet");
  const std::size_t idx[] = {ai};
  const auto pa = joint.marginal(idx);
  double total = 0.0;
  for (std::size_t a = 0; a < pa.size(); ++a) {
    if (pa[a] <= 1e-12) continue;
    if (is_forbidden_cost(cost.lambda[a])) return kForbiddenCost;
    total += pa[a] * cost.lambda[a];
  }
  return total;
}

double expected_distortion(const JointDistribution& joint, const DistortionTable& table,
                           const std::string& source_var, const std::string& recon_var) {
  const std::size_t xi = joint.index_of(source_var), ri = joint.index_of(recon_var);
  if (joint.variables()[xi].size != table.source_size || joint.variables()[ri].size != table.recon_size)
    throw std::invalid_argument("distortion table does not match alphabets");
  const std::size_t idx[] = {xi, ri};
  const auto pxr = joint.marginal(idx);
  double total = 0.0;
  for (std::size_t x = 0; x < table.source_size; ++x)
    for (std::size_t r = 0; r < table.recon_size; ++r) total += pxr[x * table.recon_size + r] * table.at(x, r);
  return total;
}

ConditionalChannel expand_switching_channel(const SwitchingModel& m) {
  const std::size_t nx = m.x().size, nw = m.w().size;
  const std::size_t nyz = nw + 1;  // W symbols plus the erasure symbol
  const std::size_t e = m.erasure_symbol();

  // p(w|x) from the source pair
  const auto& pxw = m.source_pair.mass();
  std::vector<double> px(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t w = 0; w < nw; ++w) px[x] += pxw[x * nw + w];

  Alphabet a_alpha{"a", 4};
  Alphabet x_alpha = m.x();
  Alphabet y_alpha{"y", nyz};
  Alphabet z_alpha{"z", nyz};

  std::vector<double> mass(4 * nx * nyz * nyz, 0.0);
  auto at = [&](std::size_t a, std::size_t x, std::size_t y, std::size_t z) -> double& {
    return mass[((a * nx + x) * nyz + y) * nyz + z];
  };
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t x = 0; x < nx; ++x) {
      if (px[x] <= 0.0) {
        at(a, x, e, e) = 1.0;  // unreachable conditioning cell, keep it a pmf
        continue;
      }
      for (std::size_t w = 0; w < nw; ++w) {
        const double pw = pxw[x * nw + w] / px[x];
        const std::size_t y = (a == 1 || a == 3) ? w : e;
        const std::size_t z = (a == 2 || a == 3) ? w : e;
        at(a, x, y, z) += pw;
      }
    }
  }
  return ConditionalChannel({a_alpha, x_alpha}, {y_alpha, z_alpha}, std::move(mass));
}

BroadcastModel switching_to_broadcast(const SwitchingModel& m) {
  const std::size_t nx = m.x().size, nw = m.w().size;
  std::vector<double> px(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t w = 0; w < nw; ++w) px[x] += m.source_pair.mass()[x * nw + w];

  BroadcastModel b{JointDistribution({m.x()}, std::move(px)),
                   expand_switching_channel(m),
                   CostTable{{m.lambdas[0], m.lambdas[1], m.lambdas[2], m.lambdas[3]}},
                   DistortionTable::hamming(nx),
                   DistortionTable::hamming(nx),
                   /*degraded=*/false};
  return validate(std::move(b));
}

}  // namespace casvm

#include "casvm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "casvm/parallel.hpp"

namespace casvm::oracle {

namespace {

// marginal over the named variables, accumulated directly from the raw table
std::vector<double> direct_marginal(const JointDistribution& d, const std::vector<std::size_t>& vars) {
  std::size_t out = 1;
  for (std::size_t v : vars) out *= d.variables()[v].size;
  std::vector<double> m(out, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t v : vars) key = key * d.variables()[v].size + (i / d.stride(v)) % d.variables()[v].size;
    m[key] += d.mass()[i];
  }
  return m;
}

}  // namespace

double mi_oracle(const JointDistribution& d, std::span<const std::string> a, std::span<const std::string> b,
                 std::span<const std::string> given) {
  std::vector<std::size_t> ia, ib, ig;
  for (const auto& n : a) ia.push_back(d.index_of(n));
  for (const auto& n : b) ib.push_back(d.index_of(n));
  for (const auto& n : given) ig.push_back(d.index_of(n));

  std::vector<std::size_t> abg = ia, ag = ia, bg = ib;
  abg.insert(abg.end(), ib.begin(), ib.end());
  abg.insert(abg.end(), ig.begin(), ig.end());
  ag.insert(ag.end(), ig.begin(), ig.end());
  bg.insert(bg.end(), ig.begin(), ig.end());

  const auto p_abg = direct_marginal(d, abg);
  const auto p_ag = direct_marginal(d, ag);
  const auto p_bg = direct_marginal(d, bg);
  const auto p_g = direct_marginal(d, ig);

  std::size_t sa = 1, sb = 1, sg = 1;
  for (std::size_t v : ia) sa *= d.variables()[v].size;
  for (std::size_t v : ib) sb *= d.variables()[v].size;
  for (std::size_t v : ig) sg *= d.variables()[v].size;

  double mi = 0.0;
  for (std::size_t ka = 0; ka < sa; ++ka)
    for (std::size_t kb = 0; kb < sb; ++kb)
      for (std::size_t kg = 0; kg < sg; ++kg) {
        const double p = p_abg[(ka * sb + kb) * sg + kg];
        if (p <= 0.0) continue;
        const double pg = ig.empty() ? 1.0 : p_g[kg];
        mi += p * std::log2(p * pg / (p_ag[ka * sg + kg] * p_bg[kb * sg + kg]));
      }
  return std::max(mi, 0.0);
}

double mi_oracle(const JointDistribution& d, std::initializer_list<std::string> a,
                 std::initializer_list<std::string> b, std::initializer_list<std::string> given) {
  return mi_oracle(d, std::span<const std::string>(a.begin(), a.size()),
                   std::span<const std::string>(b.begin(), b.size()),
                   std::span<const std::string>(given.begin(), given.size()));
}

std::size_t GridSpec::denominator() const {
  if (!(step > 0.0) || step > 0.5) throw std::invalid_argument("grid step must lie in (0, 0.5]");
  const auto den = static_cast<std::size_t>(std::llround(1.0 / step));
  if (std::abs(1.0 / step - static_cast<double>(den)) > 1e-9)
    throw std::invalid_argument("grid step must be the reciprocal of an integer");
  return den;
}

namespace {

// all length-k compositions of n, as probability vectors c/n
std::vector<std::vector<double>> simplex_grid(std::size_t n, std::size_t k,
                                              const std::vector<bool>& allowed) {
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> c(k, 0);
  const auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == k) {
      if (left > 0 && !(allowed.empty() || allowed[pos])) return;
      c[pos] = left;
      std::vector<double> p(k);
      for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(n);
      out.push_back(std::move(p));
      return;
    }
    const std::size_t cap = (allowed.empty() || allowed[pos]) ? left : 0;
    for (std::size_t v = 0; v <= cap; ++v) {
      c[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
    r *= base;
  }
  return r;
}

// direct conditional mutual information on a flat table; groups are given as
// (stride, size) pairs precomputed by the caller
struct FlatGroups {
  // key extraction for a flat index
  std::vector<std::pair<std::size_t, std::size_t>> a, b, g;  // (stride, size)
  std::size_t sa = 1, sb = 1, sg = 1;

  std::size_t key(const std::vector<std::pair<std::size_t, std::size_t>>& grp, std::size_t idx) const {
    std::size_t k = 0;
    for (const auto& [stride, size] : grp) k = k * size + (idx / stride) % size;
    return k;
  }
};

double flat_cmi(const std::vector<double>& mass, const FlatGroups& fg) {
  std::vector<double> p_abg(fg.sa * fg.sb * fg.sg, 0.0), p_ag(fg.sa * fg.sg, 0.0), p_bg(fg.sb * fg.sg, 0.0),
      p_g(fg.sg, 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double m = mass[i];
    if (m == 0.0) continue;
    const std::size_t ka = fg.key(fg.a, i), kb = fg.key(fg.b, i), kg = fg.key(fg.g, i);
    p_abg[(ka * fg.sb + kb) * fg.sg + kg] += m;
    p_ag[ka * fg.sg + kg] += m;
    p_bg[kb * fg.sg + kg] += m;
    p_g[kg] += m;
  }
  double mi = 0.0;
  for (std::size_t ka = 0; ka < fg.sa; ++ka)
    for (std::size_t kb = 0; kb < fg.sb; ++kb)
      for (std::size_t kg = 0; kg < fg.sg; ++kg) {
        const double p = p_abg[(ka * fg.sb + kb) * fg.sg + kg];
        if (p <= 0.0) continue;
        mi += p * std::log2(p * p_g[kg] / (p_ag[ka * fg.sg + kg] * p_bg[kb * fg.sg + kg]));
      }
  return std::max(mi, 0.0);
}

}  // namespace

std::uint64_t cascade_enumeration_size(const CascadeModel& m, const GridSpec& grid) {
  const std::size_t den = grid.denominator();
  const std::size_t outcomes = m.d1.recon_size * m.a().size * grid.u_size;
  std::vector<bool> allowed(outcomes, true);
  for (std::size_t d = 0; d < outcomes; ++d)
    if (is_forbidden_cost(m.cost.lambda[(d / grid.u_size) % m.a().size])) allowed[d] = false;
  const auto per_cell = simplex_grid(den, outcomes, allowed).size();
  return checked_pow(per_cell, m.x().size * m.y().size, grid.max_channels);
}

CascadeOracleResult brute_force_cascade(const CascadeModel& m, const CostBudget& cost_budget,
                                        const DistortionBudget& dist_budget, double eta,
                                        const GridSpec& grid) {
  const std::size_t den = grid.denominator();
  const std::size_t nx = m.x().size, ny = m.y().size, nz = m.z().size, na = m.a().size;
  const std::size_t n1 = m.d1.recon_size, n2 = m.d2.recon_size, nu = grid.u_size;
  const std::size_t outcomes = n1 * na * nu;
  const std::size_t cells = nx * ny;

  std::vector<bool> allowed(outcomes, true);
  for (std::size_t d = 0; d < outcomes; ++d)
    if (is_forbidden_cost(m.cost.lambda[(d / nu) % na])) allowed[d] = false;

  const auto cell_choices = simplex_grid(den, outcomes, allowed);
  const std::uint64_t total = checked_pow(cell_choices.size(), cells, grid.max_channels);
  if (total > grid.max_channels)
    throw std::runtime_error("cascade enumeration needs more than " + std::to_string(grid.max_channels) +
                             " channels (" + std::to_string(cell_choices.size()) + "^" + std::to_string(cells) +
                             "); coarsen the grid or cap the auxiliary alphabet");

  // flat joint over (x, y, xh1, a, u, z), strides precomputed
  const std::size_t sz_z = 1, sz_u = nz, sz_a = nz * nu, sz_x1 = nz * nu * na;
  const std::size_t sz_y = sz_x1 * n1, sz_x = sz_y * ny;
  const std::size_t joint_size = sz_x * nx;

  FlatGroups g_r1;  // I(x ; xh1,a,u | y)
  g_r1.a = {{sz_x, nx}};
  g_r1.b = {{sz_x1, n1}, {sz_a, na}, {sz_u, nu}};
  g_r1.g = {{sz_y, ny}};
  g_r1.sa = nx;
  g_r1.sb = n1 * na * nu;
  g_r1.sg = ny;
  FlatGroups g_r2a;  // I(x,y ; a)
  g_r2a.a = {{sz_x, nx}, {sz_y, ny}};
  g_r2a.b = {{sz_a, na}};
  g_r2a.sa = nx * ny;
  g_r2a.sb = na;
  FlatGroups g_r2b;  // I(x,y ; u | a,z)
  g_r2b.a = {{sz_x, nx}, {sz_y, ny}};
  g_r2b.b = {{sz_u, nu}};
  g_r2b.g = {{sz_a, na}, {sz_z, nz}};
  g_r2b.sa = nx * ny;
  g_r2b.sb = nu;
  g_r2b.sg = na * nz;

  const std::uint64_t n_first = cell_choices.size();
  const std::uint64_t per_first = total / n_first;

  struct Best {
    bool found = false;
    double objective = 0.0;
    std::uint64_t index = 0;
    RegionPoint point;
  };
  std::vector<Best> partial(n_first);

  parallel_for(n_first, [&](std::size_t first) {
    Best best;
    std::vector<double> joint(joint_size);
    std::vector<double> pxuz(nx * nu * nz);
    std::vector<double> paz(na * nz);
    std::vector<std::size_t> cell_idx(cells, 0);
    cell_idx[0] = first;

    for (std::uint64_t local = 0; local < per_first; ++local) {
      std::uint64_t rest = local;
      for (std::size_t c = 1; c < cells; ++c) {
        cell_idx[c] = rest % n_first;
        rest /= n_first;
      }

      // joint and the small marginals needed for cost/distortion/decode
      std::fill(joint.begin(), joint.end(), 0.0);
      std::fill(pxuz.begin(), pxuz.end(), 0.0);
      double cost = 0.0, d1 = 0.0;
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
          const double ps = m.source.mass()[x * ny + y];
          if (ps == 0.0) continue;
          const auto& cell = cell_choices[cell_idx[x * ny + y]];
          for (std::size_t d = 0; d < outcomes; ++d) {
            const double pd = ps * cell[d];
            if (pd == 0.0) continue;
            const std::size_t x1 = d / (na * nu), a = (d / nu) % na, u = d % nu;
            cost += pd * (is_forbidden_cost(m.cost.lambda[a]) ? 0.0 : m.cost.lambda[a]);
            d1 += pd * m.d1.at(x, x1);
            const auto vs = m.vm.slice(a * ny + y);
            const std::size_t base = x * sz_x + y * sz_y + x1 * sz_x1 + a * sz_a + u * sz_u;
            for (std::size_t z = 0; z < nz; ++z) {
              joint[base + z] += pd * vs[z];
              pxuz[(x * nu + u) * nz + z] += pd * vs[z];
            }
          }
        }

      // exact decode per (u,z), then the residual distortion at Node 3
      double d2 = 0.0;
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t z = 0; z < nz; ++z) {
          double best_v = std::numeric_limits<double>::infinity();
          for (std::size_t r = 0; r < n2; ++r) {
            double v = 0.0;
            for (std::size_t x = 0; x < nx; ++x) v += pxuz[(x * nu + u) * nz + z] * m.d2.at(x, r);
            best_v = std::min(best_v, v);
          }
          d2 += best_v;
        }

      if (cost <= cost_budget.gamma + 1e-12 && d1 <= dist_budget.d1 + 1e-12 && d2 <= dist_budget.d2 + 1e-12) {
        const double r1 = flat_cmi(joint, g_r1);
        const double r2 = flat_cmi(joint, g_r2a) + flat_cmi(joint, g_r2b);
        const double obj = r1 + eta * r2;
        const std::uint64_t index = first * per_first + local;
        if (!best.found || obj < best.objective - 1e-15 ||
            (std::abs(obj - best.objective) <= 1e-15 && index < best.index)) {
          best.found = true;
          best.objective = obj;
          best.index = index;
          best.point = RegionPoint{r1, r2, d1, d2, cost};
        }
      }
    }
    partial[first] = best;
  });

  CascadeOracleResult result;
  std::uint64_t best_index = 0;
  for (const auto& b : partial) {
    if (!b.found) continue;
    if (!result.feasible || b.objective < result.objective - 1e-15 ||
        (std::abs(b.objective - result.objective) <= 1e-15 && b.index < best_index)) {
      result.feasible = true;
      result.objective = b.objective;
      result.point = b.point;
      best_index = b.index;
    }
  }
  return result;
}

std::uint64_t cr_enumeration_size(const BroadcastModel& m, const GridSpec& grid) {
  const std::size_t den = grid.denominator();
  std::vector<bool> a_allowed(m.a().size, true);
  for (std::size_t a = 0; a < m.a().size; ++a)
    if (is_forbidden_cost(m.cost.lambda[a])) a_allowed[a] = false;
  const auto a_choices = simplex_grid(den, m.a().size, a_allowed).size();
  const auto r_choices = simplex_grid(den, m.d1.recon_size * m.d2.recon_size, {}).size();
  const std::uint64_t a_total = checked_pow(a_choices, m.x().size, grid.max_channels);
  const std::uint64_t r_total = checked_pow(r_choices, m.x().size * m.a().size, grid.max_channels);
  if (a_total > grid.max_channels / std::max<std::uint64_t>(r_total, 1)) return grid.max_channels + 1;
  return a_total * r_total;
}

CROracleResult brute_force_cr(const BroadcastModel& m, const CostBudget& cost_budget,
                              const DistortionBudget& dist_budget, const BroadcastWeights& weights,
                              const GridSpec& grid) {
  if (!m.degraded) throw std::invalid_argument("common-reconstruction oracle requires a degraded model");
  const std::size_t den = grid.denominator();
  const std::size_t nx = m.x().size, na = m.a().size, ny = m.y().size, nz = m.z().size;
  const std::size_t n1 = m.d1.recon_size, n2 = m.d2.recon_size;

  std::vector<bool> a_allowed(na, true);
  for (std::size_t a = 0; a < na; ++a)
    if (is_forbidden_cost(m.cost.lambda[a])) a_allowed[a] = false;
  const auto a_choices = simplex_grid(den, na, a_allowed);
  const auto r_choices = simplex_grid(den, n1 * n2, {});

  const std::uint64_t a_total = checked_pow(a_choices.size(), nx, grid.max_channels);
  const std::uint64_t r_total = checked_pow(r_choices.size(), nx * na, grid.max_channels);
  if (a_total > grid.max_channels || r_total > grid.max_channels ||
      a_total > grid.max_channels / r_total)
    throw std::runtime_error("common-reconstruction enumeration needs more than " +
                             std::to_string(grid.max_channels) + " channels (" +
                             std::to_string(a_choices.size()) + "^" + std::to_string(nx) + " * " +
                             std::to_string(r_choices.size()) + "^" + std::to_string(nx * na) +
                             "); coarsen the grid");

  // flat joint over (x, a, y, z, xh1, xh2)
  const std::size_t sz_x2 = 1, sz_x1 = n2, sz_z = n1 * n2, sz_y = sz_z * nz, sz_a = sz_y * ny;
  const std::size_t sz_x = sz_a * na;
  const std::size_t joint_size = sz_x * nx;

  FlatGroups g_xa;  // I(x;a)
  g_xa.a = {{sz_x, nx}};
  g_xa.b = {{sz_a, na}};
  g_xa.sa = nx;
  g_xa.sb = na;
  FlatGroups g_12;  // I(x ; xh1,xh2 | a,y)
  g_12.a = {{sz_x, nx}};
  g_12.b = {{sz_x1, n1}, {sz_x2, n2}};
  g_12.g = {{sz_a, na}, {sz_y, ny}};
  g_12.sa = nx;
  g_12.sb = n1 * n2;
  g_12.sg = na * ny;
  FlatGroups g_2z;  // I(x ; xh2 | a,z)
  g_2z.a = {{sz_x, nx}};
  g_2z.b = {{sz_x2, n2}};
  g_2z.g = {{sz_a, na}, {sz_z, nz}};
  g_2z.sa = nx;
  g_2z.sb = n2;
  g_2z.sg = na * nz;
  FlatGroups g_1y2;  // I(x ; xh1 | a,y,xh2)
  g_1y2.a = {{sz_x, nx}};
  g_1y2.b = {{sz_x1, n1}};
  g_1y2.g = {{sz_a, na}, {sz_y, ny}, {sz_x2, n2}};
  g_1y2.sa = nx;
  g_1y2.sb = n1;
  g_1y2.sg = na * ny * n2;

  struct Best {
    bool found = false;
    double objective = 0.0;
    std::uint64_t index = 0;
    BroadcastRegionPoint point;
    RateTriple rates;
  };
  std::vector<Best> partial(a_total);

  parallel_for(a_total, [&](std::size_t a_outer) {
    Best best;
    std::vector<double> joint(joint_size);
    std::vector<std::size_t> a_idx(nx, 0);
    {
      std::uint64_t rest = a_outer;
      for (std::size_t x = 0; x < nx; ++x) {
        a_idx[x] = rest % a_choices.size();
        rest /= a_choices.size();
      }
    }
    std::vector<std::size_t> r_idx(nx * na, 0);

    for (std::uint64_t local = 0; local < r_total; ++local) {
      std::uint64_t rest = local;
      for (std::size_t c = 0; c < nx * na; ++c) {
        r_idx[c] = rest % r_choices.size();
        rest /= r_choices.size();
      }

      std::fill(joint.begin(), joint.end(), 0.0);
      double cost = 0.0, d1 = 0.0, d2 = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        const double px = m.source.mass()[x];
        if (px == 0.0) continue;
        const auto& pa = a_choices[a_idx[x]];
        for (std::size_t a = 0; a < na; ++a) {
          const double pxa = px * pa[a];
          if (pxa == 0.0) continue;
          cost += pxa * (is_forbidden_cost(m.cost.lambda[a]) ? 0.0 : m.cost.lambda[a]);
          const auto& pr = r_choices[r_idx[x * na + a]];
          for (std::size_t r = 0; r < n1 * n2; ++r) {
            const double p_rec = pr[r];
            if (p_rec == 0.0) continue;
            d1 += pxa * p_rec * m.d1.at(x, r / n2);
            d2 += pxa * p_rec * m.d2.at(x, r % n2);
          }
          const auto vs = m.vm.slice(a * nx + x);
          for (std::size_t yz = 0; yz < ny * nz; ++yz) {
            const double pyz = pxa * vs[yz];
            if (pyz == 0.0) continue;
            const std::size_t base = x * sz_x + a * sz_a + (yz / nz) * sz_y + (yz % nz) * sz_z;
            for (std::size_t r = 0; r < n1 * n2; ++r) joint[base + r] += pyz * pr[r];
          }
        }
      }

      if (cost <= cost_budget.gamma + 1e-12 && d1 <= dist_budget.d1 + 1e-12 && d2 <= dist_budget.d2 + 1e-12) {
        BroadcastRegionPoint p;
        p.rb_min = flat_cmi(joint, g_xa);
        p.r1_plus_rb_min = p.rb_min + flat_cmi(joint, g_12);
        p.r2_plus_rb_min = p.rb_min + flat_cmi(joint, g_2z);
        p.r_sum_min = p.r2_plus_rb_min + flat_cmi(joint, g_1y2);
        p.cost = cost;
        p.d1 = d1;
        p.d2 = d2;
        // same sequential-minimization rule as the main evaluator
        RateTriple r;
        r.rb = p.rb_min;
        r.r1 = std::max(0.0, p.r1_plus_rb_min - r.rb);
        r.r2 = std::max({0.0, p.r2_plus_rb_min - r.rb, *p.r_sum_min - r.rb - r.r1});
        const double obj = weights.w1 * r.r1 + weights.w2 * r.r2 + weights.wb * r.rb;
        const std::uint64_t index = a_outer * r_total + local;
        if (!best.found || obj < best.objective - 1e-15 ||
            (std::abs(obj - best.objective) <= 1e-15 && index < best.index)) {
          best.found = true;
          best.objective = obj;
          best.index = index;
          best.point = p;
          best.rates = r;
        }
      }
    }
    partial[a_outer] = best;
  });

  CROracleResult result;
  std::uint64_t best_index = 0;
  for (const auto& b : partial) {
    if (!b.found) continue;
    if (!result.feasible || b.objective < result.objective - 1e-15 ||
        (std::abs(b.objective - result.objective) <= 1e-15 && b.index < best_index)) {
      result.feasible = true;
      result.objective = b.objective;
      result.point = b.point;
      result.rates = b.rates;
      best_index = b.index;
    }
  }
  return result;
}

}  // namespace casvm::oracle

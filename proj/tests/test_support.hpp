#pragma once

// shared generators for the test suites and the acceptance runner

#include <vector>

#include "casvm/broadcast.hpp"
#include "casvm/cascade.hpp"
#include "casvm/model.hpp"
#include "casvm/rng.hpp"

namespace casvm::testing {

inline ConditionalChannel random_channel(Rng& rng, std::vector<Alphabet> from, std::vector<Alphabet> to) {
  std::size_t cells = 1, outcomes = 1;
  for (const auto& a : from) cells *= a.size;
  for (const auto& a : to) outcomes *= a.size;
  std::vector<double> mass;
  mass.reserve(cells * outcomes);
  for (std::size_t c = 0; c < cells; ++c) {
    const auto row = rng.next_simplex(outcomes);
    mass.insert(mass.end(), row.begin(), row.end());
  }
  return ConditionalChannel(std::move(from), std::move(to), std::move(mass));
}

inline CascadeModel random_cascade_model(Rng& rng, std::size_t nx, std::size_t ny, std::size_t na,
                                         std::size_t nz, double max_cost = 1.0) {
  JointDistribution source({{"x", nx}, {"y", ny}}, rng.next_simplex(nx * ny));
  auto vm = random_channel(rng, {{"a", na}, {"y", ny}}, {{"z", nz}});
  std::vector<double> lambda(na);
  for (auto& c : lambda) c = max_cost * rng.next_double();
  CascadeModel m{std::move(source), std::move(vm), CostTable{std::move(lambda)},
                 DistortionTable::hamming(nx), DistortionTable::hamming(nx)};
  return validate(std::move(m));
}

// degraded by construction: p(y|a,x) p(z|y,a)
inline BroadcastModel random_degraded_broadcast(Rng& rng, std::size_t nx, std::size_t na, std::size_t ny,
                                                std::size_t nz, double max_cost = 1.0) {
  std::vector<double> vm_mass;
  vm_mass.reserve(na * nx * ny * nz);
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<std::vector<double>> pz;
    for (std::size_t y = 0; y < ny; ++y) pz.push_back(rng.next_simplex(nz));
    for (std::size_t x = 0; x < nx; ++x) {
      const auto py = rng.next_simplex(ny);
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z) vm_mass.push_back(py[y] * pz[y][z]);
    }
  }
  std::vector<double> lambda(na);
  for (auto& c : lambda) c = max_cost * rng.next_double();
  BroadcastModel m{JointDistribution({{"x", nx}}, rng.next_simplex(nx)),
                   ConditionalChannel({{"a", na}, {"x", nx}}, {{"y", ny}, {"z", nz}}, vm_mass),
                   CostTable{std::move(lambda)},
                   DistortionTable::hamming(nx),
                   DistortionTable::hamming(nx),
                   true};
  return validate(std::move(m));
}

// cascade test channel carrying an action channel with u := x, xh1 := x,
// decode f(u, z) := u; the exact-copy embedding of the lossless scheme
inline CascadeTestChannel exact_copy_channel(const CascadeModel& m, const ConditionalChannel& action) {
  const std::size_t nx = m.x().size, ny = m.y().size, na = m.a().size, nz = m.z().size;
  std::vector<double> mass(nx * ny * nx * na * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const auto as = action.slice(x * ny + y);
      for (std::size_t a = 0; a < na; ++a)
        mass[(x * ny + y) * (nx * na * nx) + (x * na + a) * nx + x] = as[a];
    }
  CascadeTestChannel t{
      ConditionalChannel({{"x", nx}, {"y", ny}}, {{"xh1", nx}, {"a", na}, {"u", nx}}, std::move(mass)),
      {}};
  t.decode.resize(nx * nz);
  for (std::size_t u = 0; u < nx; ++u)
    for (std::size_t z = 0; z < nz; ++z) t.decode[u * nz + z] = u;
  return t;
}

// p(xh1, xh2 | x, a) with xh1 = xh2 = x
inline ConditionalChannel identity_recon(std::size_t nx, std::size_t na) {
  std::vector<double> mass(nx * na * nx * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a) mass[(x * na + a) * nx * nx + x * nx + x] = 1.0;
  return ConditionalChannel({{"x", nx}, {"a", na}}, {{"xh1", nx}, {"xh2", nx}}, std::move(mass));
}

inline SwitchingModel bsc_switching_model(double delta) {
  SwitchingModel m{JointDistribution({{"x", 2}, {"w", 2}},
                                     {(1 - delta) / 2, delta / 2, delta / 2, (1 - delta) / 2}),
                   {kForbiddenCost, 1.0, 1.0, kForbiddenCost}};
  return validate(std::move(m));
}

inline SwitchingModel schannel_switching_model(double delta) {
  SwitchingModel m{JointDistribution({{"x", 2}, {"w", 2}}, {(1 - delta) / 2, delta / 2, 0.0, 0.5}),
                   {kForbiddenCost, 1.0, 0.0, kForbiddenCost}};
  return validate(std::move(m));
}

}  // namespace casvm::testing

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "casvm/oracle.hpp"
#include "casvm/prob.hpp"
#include "casvm/rng.hpp"

using namespace casvm;

namespace {

JointDistribution random_joint(Rng& rng, std::vector<Alphabet> vars) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= v.size;
  return JointDistribution(std::move(vars), rng.next_simplex(n));
}

// p(a) p(b|a) p(c|b) with random factors
JointDistribution random_chain(Rng& rng, std::size_t na, std::size_t nb, std::size_t nc) {
  const auto pa = rng.next_simplex(na);
  JointDistribution d({{"a", na}}, pa);
  std::vector<double> pba;
  for (std::size_t i = 0; i < na; ++i) {
    const auto row = rng.next_simplex(nb);
    pba.insert(pba.end(), row.begin(), row.end());
  }
  d = compose(d, ConditionalChannel({{"a", na}}, {{"b", nb}}, pba));
  std::vector<double> pcb;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto row = rng.next_simplex(nc);
    pcb.insert(pcb.end(), row.begin(), row.end());
  }
  return compose(d, ConditionalChannel({{"b", nb}}, {{"c", nc}}, pcb));
}

}  // namespace

TEST_CASE("entropy basics") {
  JointDistribution uniform4({{"x", 4}}, {0.25, 0.25, 0.25, 0.25});
  CHECK(entropy(uniform4, {"x"}) == doctest::Approx(2.0).epsilon(1e-12));

  JointDistribution point({{"x", 3}}, {0.0, 1.0, 0.0});
  CHECK(entropy(point, {"x"}) == doctest::Approx(0.0).epsilon(1e-12));

  // -0.6 log2 0.6 - 0.4 log2 0.4, evaluated directly
  JointDistribution biased({{"x", 2}}, {0.6, 0.4});
  const double expected = -(0.6 * std::log2(0.6) + 0.4 * std::log2(0.4));
  CHECK(entropy(biased, {"x"}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(entropy(biased, {"x"}) == doctest::Approx(0.9709506).epsilon(1e-6));
}

TEST_CASE("entropy input validation") {
  JointDistribution d({{"x", 2}, {"y", 2}}, {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(entropy(d, {"nope"}), std::invalid_argument);
  CHECK_THROWS_AS(entropy(d, std::initializer_list<std::string>{}), std::invalid_argument);
}

TEST_CASE("variable names must be unique") {
  CHECK_THROWS_AS(JointDistribution({{"x", 2}, {"x", 2}}, {0.25, 0.25, 0.25, 0.25}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ConditionalChannel({{"x", 2}}, {{"x", 2}}, {1, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("normalization gate") {
  CHECK_THROWS_AS(JointDistribution({{"x", 2}}, {0.5, 0.48}), std::invalid_argument);
  CHECK_THROWS_AS(JointDistribution({{"x", 2}}, {-0.1, 1.1}), std::invalid_argument);
  CHECK_NOTHROW(JointDistribution({{"x", 2}}, {0.5, 0.5 + 5e-10}));
  const double nan = std::nan("");
  CHECK_THROWS_AS(JointDistribution({{"x", 2}}, {nan, 1.0}), std::invalid_argument);
}

TEST_CASE("conditional mutual information basics") {
  JointDistribution indep({{"x", 2}, {"y", 2}}, {0.25, 0.25, 0.25, 0.25});
  CHECK(conditional_mutual_information(indep, {"x"}, {"y"}, {}) == doctest::Approx(0.0).epsilon(1e-12));

  JointDistribution copy({{"x", 2}, {"y", 2}}, {0.5, 0.0, 0.0, 0.5});
  CHECK(conditional_mutual_information(copy, {"x"}, {"y"}, {}) == doctest::Approx(1.0).epsilon(1e-12));

  // doubly symmetric binary pair with crossover 0.6
  JointDistribution dsbs({{"x", 2}, {"y", 2}}, {0.2, 0.3, 0.3, 0.2});
  const double expected = oracle::mi_oracle(dsbs, {"x"}, {"y"}, {});
  CHECK(conditional_mutual_information(dsbs, {"x"}, {"y"}, {}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(conditional_mutual_information(dsbs, {"x"}, {"y"}, {}) == doctest::Approx(0.0290494).epsilon(1e-6));

  CHECK_THROWS_AS(conditional_mutual_information(dsbs, {"x"}, {"x"}, {}), std::invalid_argument);
}

TEST_CASE("marginalize") {
  // product pmf: marginal equals the factor
  JointDistribution prod({{"x", 2}, {"y", 3}}, {0.6 * 0.2, 0.6 * 0.3, 0.6 * 0.5, 0.4 * 0.2, 0.4 * 0.3, 0.4 * 0.5});
  const auto mx = marginalize(prod, {"x"});
  CHECK(mx.mass()[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(mx.mass()[1] == doctest::Approx(0.4).epsilon(1e-12));

  const auto all = marginalize(prod, {"x", "y"});
  for (std::size_t i = 0; i < prod.size(); ++i) CHECK(all.mass()[i] == doctest::Approx(prod.mass()[i]));

  CHECK_THROWS_AS(marginalize(prod, std::initializer_list<std::string>{}), std::invalid_argument);
}

TEST_CASE("compose basics") {
  JointDistribution px({{"x", 2}}, {0.3, 0.7});
  const auto diag = compose(px, ConditionalChannel::identity({"x", 2}, "y"));
  CHECK(diag.mass()[0] == doctest::Approx(0.3));
  CHECK(diag.mass()[1] == doctest::Approx(0.0));
  CHECK(diag.mass()[3] == doctest::Approx(0.7));

  const auto degenerate = compose(px, ConditionalChannel::constant({{"x", 2}}, {"c", 1}, 0));
  CHECK(degenerate.variables().size() == 2);
  const auto back = marginalize(degenerate, {"x"});
  CHECK(back.mass()[0] == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(compose(px, ConditionalChannel::identity({"x", 2}, "x")), std::invalid_argument);
}

TEST_CASE("compose matches a nested-loop construction of the full joint") {
  // p(x,y) -> p(a|x,y) -> p(z|a,y), against an independent triple-loop build
  Rng rng(2024);
  const std::size_t nx = 2, ny = 3, na = 2, nz = 3;
  auto source = random_joint(rng, {{"x", nx}, {"y", ny}});
  std::vector<double> pa, pz;
  for (std::size_t i = 0; i < nx * ny; ++i) {
    const auto row = rng.next_simplex(na);
    pa.insert(pa.end(), row.begin(), row.end());
  }
  for (std::size_t i = 0; i < na * ny; ++i) {
    const auto row = rng.next_simplex(nz);
    pz.insert(pz.end(), row.begin(), row.end());
  }
  ConditionalChannel action({{"x", nx}, {"y", ny}}, {{"a", na}}, pa);
  ConditionalChannel vm({{"a", na}, {"y", ny}}, {{"z", nz}}, pz);

  const auto joint = compose(compose(source, action), vm);  // (x, y, a, z)

  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t z = 0; z < nz; ++z) {
          const double direct =
              source.mass()[x * ny + y] * pa[(x * ny + y) * na + a] * pz[(a * ny + y) * nz + z];
          const std::size_t idx[] = {x, y, a, z};
          CHECK(joint.at(idx) == doctest::Approx(direct).epsilon(1e-12));
        }

  // marginalizing the full joint back to (x,y) recovers the source
  const auto back = marginalize(joint, {"x", "y"});
  for (std::size_t i = 0; i < source.size(); ++i)
    CHECK(back.mass()[i] == doctest::Approx(source.mass()[i]).epsilon(1e-12));

  // the joint satisfies x -- (a,y) -- z by construction
  CHECK(is_markov_chain(joint, {"x"}, {"a", "y"}, {"z"}, 1e-9));
}

TEST_CASE("markov chain check") {
  Rng rng(7);
  const auto chain = random_chain(rng, 3, 2, 3);
  CHECK(is_markov_chain(chain, {"a"}, {"b"}, {"c"}, 1e-9));

  // a = c exact copies, b independent: I(a;c|b) = H(a) > 0
  JointDistribution bad({{"a", 2}, {"b", 2}, {"c", 2}},
                        {0.25, 0.0, 0.25, 0.0, 0.0, 0.25, 0.0, 0.25});
  CHECK_FALSE(is_markov_chain(bad, {"a"}, {"b"}, {"c"}, 1e-9));
}

TEST_CASE("kernel properties on random distributions") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t na = 2 + rng.next_below(3), nb = 2 + rng.next_below(3), nc = 2 + rng.next_below(2);
    auto d = random_joint(rng, {{"a", na}, {"b", nb}, {"c", nc}});

    // chain rule H(a,b) = H(a) + H(b|a), the second term summed directly
    const std::size_t ia[] = {0}, iab[] = {0, 1};
    const auto pa = d.marginal(ia);
    const auto pab = d.marginal(iab);
    double h_b_given_a = 0.0;
    for (std::size_t av = 0; av < na; ++av)
      for (std::size_t bv = 0; bv < nb; ++bv) {
        const double p = pab[av * nb + bv];
        if (p > 0.0) h_b_given_a -= p * std::log2(p / pa[av]);
      }
    CHECK(entropy(d, {"a", "b"}) ==
          doctest::Approx(entropy(d, {"a"}) + h_b_given_a).epsilon(1e-9));
    CHECK(entropy(d, {"a", "b"}) == doctest::Approx(entropy(d, {"b", "a"})).epsilon(1e-12));

    // nonnegativity
    CHECK(entropy(d, {"a", "b", "c"}) >= 0.0);
    CHECK(conditional_mutual_information(d, {"a"}, {"b"}, {"c"}) >= 0.0);

    // oracle agreement
    const double mi = conditional_mutual_information(d, {"a"}, {"b"}, {"c"});
    const double ref = oracle::mi_oracle(d, {"a"}, {"b"}, {"c"});
    CHECK(mi == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("data processing on composed chains") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto chain = random_chain(rng, 2 + rng.next_below(3), 2 + rng.next_below(3), 2 + rng.next_below(3));
    const double i_ac = conditional_mutual_information(chain, {"a"}, {"c"}, {});
    const double i_ab = conditional_mutual_information(chain, {"a"}, {"b"}, {});
    CHECK(i_ac <= i_ab + 1e-9);
  }
}

TEST_CASE("marginalize after compose recovers the base") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto base = random_joint(rng, {{"a", 3}, {"b", 2}});
    std::vector<double> rows;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto row = rng.next_simplex(4);
      rows.insert(rows.end(), row.begin(), row.end());
    }
    const auto joint = compose(base, ConditionalChannel({{"b", 2}}, {{"c", 4}}, rows));
    const auto back = marginalize(joint, {"a", "b"});
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(std::abs(back.mass()[i] - base.mass()[i]) <= 1e-12);
  }
}

#pragma once

// Fourier-Motzkin elimination over linear inequality systems whose
// right-hand sides are symbolic nonnegative parameters (information terms).
// Everything here is exact rational arithmetic; the module verifies the two
// bundled rate-splitting derivations and their projected regions.
//
// Every declared variable carries an implicit >= 0: rates and rate splits
// are physically nonnegative, and the bundled projections are only claimed
// under that convention.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace casvm::fme {

class Rational {
 public:
  Rational() = default;
  Rational(long long num) : num_(num), den_(1) {}
  Rational(long long num, long long den);

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool positive() const { return num_ > 0; }
  bool negative() const { return num_ < 0; }

  Rational operator-() const { return Rational(-num_, den_); }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

 private:
  long long num_ = 0;
  long long den_ = 1;
};

// One inequality: <var combination> >= <param combination> + constant.
// Coefficients are dense over the owning system's name lists.  The strict
// flag only appears inside feasibility checks (negated rows).
struct Inequality {
  std::vector<Rational> var_coeffs;
  std::vector<Rational> param_coeffs;
  Rational constant;
  bool strict = false;
};

struct InequalitySystem {
  std::vector<std::string> variables;   // all implicitly >= 0
  std::vector<std::string> parameters;  // nonnegative symbols
  std::vector<Inequality> rows;

  std::size_t var_index(std::string_view name) const;
  std::size_t param_index(std::string_view name) const;
};

inline constexpr std::size_t kDefaultRowCap = 10000;

// Exact projection onto the variables not listed in `drop`.  Rows produced
// along the way are normalized, deduplicated, and stripped of anything the
// ambient nonnegativity of variables and parameters already implies.  Throws
// when an intermediate system exceeds row_cap.
InequalitySystem fme_eliminate(const InequalitySystem& sys, const std::vector<std::string>& drop,
                               std::size_t row_cap = kDefaultRowCap);

// Deterministic nonnegative rational parameter source.
class ParameterSampler {
 public:
  explicit ParameterSampler(std::uint64_t seed) : state_(seed * 0x9e3779b97f4a7c15ULL + 1) {}
  Rational next();

 private:
  std::uint64_t state_;
};

struct RedundancyResult {
  InequalitySystem system;
  std::vector<std::size_t> dropped;  // indices into the input rows
};

// Drops rows that the remaining rows (plus nonnegativity) imply under every
// sampled parameter instantiation.  Sampling-based: a dropped row is
// "possibly redundant", certified per sample by an exact feasibility check
// of the violating system.
RedundancyResult remove_redundant(const InequalitySystem& sys, std::uint64_t seed, int trials);

struct EquivalenceReport {
  bool equivalent = false;
  int trials = 0;
  std::string counterexample;  // first failing sample and row, empty when equivalent
};

// Mutual implication of the two polyhedra under sampled nonnegative
// parameters; both systems must project onto the same variable set.
EquivalenceReport verify_region_equivalence(const InequalitySystem& a, const InequalitySystem& b,
                                            std::uint64_t seed, int trials);

// Text format: `vars:` and `params:` declaration lines, then one inequality
// per line (`2*r1b + R1 >= HXAY`, fractions like 3/2 allowed); `#` comments.
InequalitySystem parse_system(std::string_view text);
std::string to_text(const InequalitySystem& sys);

// Bundled systems: the two rate-splitting derivations, their projected
// regions, and a deliberately broken target used as a negative control.
enum class Builtin { prop2, prop2_target, prop2_target_mutated, prop3, prop3_target };
InequalitySystem builtin_system(Builtin which);
std::vector<std::string> builtin_split_variables(Builtin which);
Builtin builtin_from_name(std::string_view name);  // "prop2" | "prop3" | "prop2-mutated"

}  // namespace casvm::fme

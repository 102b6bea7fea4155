#pragma once

// Finite-alphabet probability kernel: joint distributions over named
// variables, conditional channels, and the information measures (in bits)
// used by all region evaluators.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace casvm {

inline constexpr double kNormalizationTol = 1e-9;

struct Alphabet {
  std::string name;
  std::size_t size = 0;
};

// Dense joint pmf over an ordered list of finite variables.  Mass is stored
// row-major, first variable slowest.  Construction renormalizes inputs whose
// total is within kNormalizationTol of 1 and rejects anything else.
class JointDistribution {
 public:
  JointDistribution(std::vector<Alphabet> variables, std::vector<double> mass);

  const std::vector<Alphabet>& variables() const { return vars_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }

  std::size_t index_of(std::string_view name) const;     // throws if unknown
  bool has_variable(std::string_view name) const;
  std::size_t stride(std::size_t var_index) const { return strides_[var_index]; }

  double at(std::span<const std::size_t> symbols) const;

  // marginal mass over the given variable indices (row-major in that order)
  std::vector<double> marginal(std::span<const std::size_t> var_indices) const;

 private:
  std::vector<Alphabet> vars_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

// Conditional pmf p(to | from), stored row-major with the conditioning
// variables first.  Every conditioning slice must sum to 1 within tolerance.
class ConditionalChannel {
 public:
  ConditionalChannel(std::vector<Alphabet> from, std::vector<Alphabet> to, std::vector<double> mass);

  const std::vector<Alphabet>& from() const { return from_; }
  const std::vector<Alphabet>& to() const { return to_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t to_block_size() const { return to_block_; }

  // mass of one conditioning slice, contiguous over the `to` variables
  std::span<const double> slice(std::size_t from_linear_index) const;

  static ConditionalChannel identity(const Alphabet& from, std::string to_name);
  static ConditionalChannel constant(std::vector<Alphabet> from, const Alphabet& to, std::size_t symbol);

 private:
  std::vector<Alphabet> from_;
  std::vector<Alphabet> to_;
  std::vector<double> mass_;
  std::size_t to_block_ = 0;
};

// H(subset) in bits, 0*log 0 := 0.
double entropy(const JointDistribution& d, std::span<const std::string> subset);

// I(a;b|given) in bits via H(a|given)+H(b|given)-H(a,b|given); tiny negative
// round-off is clamped to zero.  Groups must be pairwise disjoint.
double conditional_mutual_information(const JointDistribution& d, std::span<const std::string> a,
                                      std::span<const std::string> b, std::span<const std::string> given);

JointDistribution marginalize(const JointDistribution& d, std::span<const std::string> keep);

// p(base) * p(ch.to | ch.from) with ch.from drawn from base's variables.
// Result variable order: base variables then ch.to.
JointDistribution compose(const JointDistribution& base, const ConditionalChannel& ch);

// true iff I(a;c|b) <= tol, i.e. a -- b -- c
bool is_markov_chain(const JointDistribution& d, std::span<const std::string> a, std::span<const std::string> b,
                     std::span<const std::string> c, double tol);

// convenience overloads for brace-literal call sites
inline double entropy(const JointDistribution& d, std::initializer_list<std::string> subset) {
  return entropy(d, std::span<const std::string>(subset.begin(), subset.size()));
}
double conditional_mutual_information(const JointDistribution& d, std::initializer_list<std::string> a,
                                      std::initializer_list<std::string> b,
                                      std::initializer_list<std::string> given);
JointDistribution marginalize(const JointDistribution& d, std::initializer_list<std::string> keep);
bool is_markov_chain(const JointDistribution& d, std::initializer_list<std::string> a,
                     std::initializer_list<std::string> b, std::initializer_list<std::string> c, double tol);

}  // namespace casvm

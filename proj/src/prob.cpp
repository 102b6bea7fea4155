#include "casvm/prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace casvm {

namespace {

std::size_t checked_table_size(const std::vector<Alphabet>& vars) {
  std::size_t n = 1;
  for (const auto& v : vars) {
    if (v.size == 0) throw std::invalid_argument("alphabet '" + v.name + "' has size 0");
    if (v.name.empty()) throw std::invalid_argument("alphabet with empty name");
    n *= v.size;
  }
  return n;
}

void check_unique_names(const std::vector<Alphabet>& vars) {
  std::unordered_set<std::string_view> seen;
  for (const auto& v : vars) {
    if (!seen.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name '" + v.name + "'");
  }
}

void check_entries(const std::vector<double>& mass) {
  for (double m : mass) {
    if (std::isnan(m)) throw std::invalid_argument("NaN entry in probability table");
    if (m < 0.0) throw std::invalid_argument("negative entry in probability table");
  }
}

double neg_sum_p_log2_p(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<Alphabet> variables, std::vector<double> mass)
    : vars_(std::move(variables)), mass_(std::move(mass)) {
  if (vars_.empty()) throw std::invalid_argument("joint distribution needs at least one variable");
  check_unique_names(vars_);
  const std::size_t n = checked_table_size(vars_);
  if (mass_.size() != n)
    throw std::invalid_argument("mass table has " + std::to_string(mass_.size()) + " entries, expected " +
                                std::to_string(n));
  check_entries(mass_);
  double sum = 0.0;
  for (double m : mass_) sum += m;
  if (std::abs(sum - 1.0) > kNormalizationTol)
    throw std::invalid_argument("mass sums to " + std::to_string(sum) + ", outside tolerance");
  for (double& m : mass_) m /= sum;

  strides_.assign(vars_.size(), 1);
  for (std::size_t i = vars_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * vars_[i].size;
}

std::size_t JointDistribution::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

bool JointDistribution::has_variable(std::string_view name) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const Alphabet& a) { return a.name == name; });
}

double JointDistribution::at(std::span<const std::size_t> symbols) const {
  if (symbols.size() != vars_.size()) throw std::invalid_argument("wrong tuple length");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= vars_[i].size) throw std::invalid_argument("symbol out of range");
    idx += symbols[i] * strides_[i];
  }
  return mass_[idx];
}

std::vector<double> JointDistribution::marginal(std::span<const std::size_t> var_indices) const {
  std::size_t out_size = 1;
  for (std::size_t vi : var_indices) out_size *= vars_[vi].size;
  std::vector<double> out(out_size, 0.0);
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const double m = mass_[i];
    if (m == 0.0) continue;
    std::size_t key = 0;
    for (std::size_t vi : var_indices) key = key * vars_[vi].size + (i / strides_[vi]) % vars_[vi].size;
    out[key] += m;
  }
  return out;
}

ConditionalChannel::ConditionalChannel(std::vector<Alphabet> from, std::vector<Alphabet> to,
                                       std::vector<double> mass)
    : from_(std::move(from)), to_(std::move(to)), mass_(std::move(mass)) {
  if (to_.empty()) throw std::invalid_argument("channel needs at least one output variable");
  std::vector<Alphabet> all = from_;
  all.insert(all.end(), to_.begin(), to_.end());
  check_unique_names(all);
  const std::size_t from_size = checked_table_size(from_);
  to_block_ = checked_table_size(to_);
  if (mass_.size() != from_size * to_block_) throw std::invalid_argument("channel table has wrong size");
  check_entries(mass_);
  for (std::size_t f = 0; f < from_size; ++f) {
    double sum = 0.0;
    for (std::size_t t = 0; t < to_block_; ++t) sum += mass_[f * to_block_ + t];
    if (std::abs(sum - 1.0) > kNormalizationTol)
      throw std::invalid_argument("channel slice " + std::to_string(f) + " sums to " + std::to_string(sum));
    for (std::size_t t = 0; t < to_block_; ++t) mass_[f * to_block_ + t] /= sum;
  }
}

std::span<const double> ConditionalChannel::slice(std::size_t from_linear_index) const {
  return std::span<const double>(mass_.data() + from_linear_index * to_block_, to_block_);
}

ConditionalChannel ConditionalChannel::identity(const Alphabet& from, std::string to_name) {
  std::vector<double> mass(from.size * from.size, 0.0);
  for (std::size_t i = 0; i < from.size; ++i) mass[i * from.size + i] = 1.0;
  return ConditionalChannel({from}, {{std::move(to_name), from.size}}, std::move(mass));
}

ConditionalChannel ConditionalChannel::constant(std::vector<Alphabet> from, const Alphabet& to,
                                                std::size_t symbol) {
  if (symbol >= to.size) throw std::invalid_argument("constant symbol out of range");
  const std::size_t from_size = checked_table_size(from);
  std::vector<double> mass(from_size * to.size, 0.0);
  for (std::size_t f = 0; f < from_size; ++f) mass[f * to.size + symbol] = 1.0;
  return ConditionalChannel(std::move(from), {to}, std::move(mass));
}

namespace {

std::vector<std::size_t> resolve(const JointDistribution& d, std::span<const std::string> names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) idx.push_back(d.index_of(n));
  return idx;
}

void check_disjoint(std::span<const std::string> a, std::span<const std::string> b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x == y) throw std::invalid_argument("variable groups overlap on '" + x + "'");
}

double entropy_of_indices(const JointDistribution& d, std::span<const std::size_t> idx) {
  if (idx.empty()) return 0.0;
  return neg_sum_p_log2_p(d.marginal(idx));
}

}  // namespace

double entropy(const JointDistribution& d, std::span<const std::string> subset) {
  if (subset.empty()) throw std::invalid_argument("entropy of empty variable set");
  const auto idx = resolve(d, subset);
  return entropy_of_indices(d, idx);
}

double conditional_mutual_information(const JointDistribution& d, std::span<const std::string> a,
                                      std::span<const std::string> b, std::span<const std::string> given) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mutual information needs nonempty groups");
  check_disjoint(a, b);
  check_disjoint(a, given);
  check_disjoint(b, given);

  auto ia = resolve(d, a);
  auto ib = resolve(d, b);
  auto ig = resolve(d, given);

  auto with_given = [&](const std::vector<std::size_t>& head) {
    std::vector<std::size_t> idx = head;
    idx.insert(idx.end(), ig.begin(), ig.end());
    return idx;
  };
  std::vector<std::size_t> iab = ia;
  iab.insert(iab.end(), ib.begin(), ib.end());

  const double h_ag = entropy_of_indices(d, with_given(ia));
  const double h_bg = entropy_of_indices(d, with_given(ib));
  const double h_abg = entropy_of_indices(d, with_given(iab));
  const double h_g = entropy_of_indices(d, ig);

  const double mi = h_ag + h_bg - h_abg - h_g;
  return mi > 0.0 ? mi : 0.0;
}

JointDistribution marginalize(const JointDistribution& d, std::span<const std::string> keep) {
  if (keep.empty()) throw std::invalid_argument("marginalize with empty keep set");
  const auto idx = resolve(d, keep);
  std::vector<Alphabet> vars;
  vars.reserve(idx.size());
  for (std::size_t vi : idx) vars.push_back(d.variables()[vi]);
  return JointDistribution(std::move(vars), d.marginal(idx));
}

JointDistribution compose(const JointDistribution& base, const ConditionalChannel& ch) {
  for (const auto& t : ch.to())
    if (base.has_variable(t.name))
      throw std::invalid_argument("compose: output variable '" + t.name + "' already present");
  std::vector<std::size_t> from_idx;
  from_idx.reserve(ch.from().size());
  for (const auto& f : ch.from()) {
    const std::size_t i = base.index_of(f.name);
    if (base.variables()[i].size != f.size)
      throw std::invalid_argument("compose: alphabet size mismatch on '" + f.name + "'");
    from_idx.push_back(i);
  }

  std::vector<Alphabet> vars = base.variables();
  vars.insert(vars.end(), ch.to().begin(), ch.to().end());

  const std::size_t block = ch.to_block_size();
  std::vector<double> mass(base.size() * block, 0.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double m = base.mass()[i];
    std::size_t f = 0;
    for (std::size_t vi : from_idx)
      f = f * base.variables()[vi].size + (i / base.stride(vi)) % base.variables()[vi].size;
    const auto s = ch.slice(f);
    for (std::size_t t = 0; t < block; ++t) mass[i * block + t] = m * s[t];
  }
  return JointDistribution(std::move(vars), std::move(mass));
}

bool is_markov_chain(const JointDistribution& d, std::span<const std::string> a, std::span<const std::string> b,
                     std::span<const std::string> c, double tol) {
  return conditional_mutual_information(d, a, c, b) <= tol;
}

double conditional_mutual_information(const JointDistribution& d, std::initializer_list<std::string> a,
                                      std::initializer_list<std::string> b,
                                      std::initializer_list<std::string> given) {
  return conditional_mutual_information(d, std::span<const std::string>(a.begin(), a.size()),
                                        std::span<const std::string>(b.begin(), b.size()),
                                        std::span<const std::string>(given.begin(), given.size()));
}

JointDistribution marginalize(const JointDistribution& d, std::initializer_list<std::string> keep) {
  return marginalize(d, std::span<const std::string>(keep.begin(), keep.size()));
}

bool is_markov_chain(const JointDistribution& d, std::initializer_list<std::string> a,
                     std::initializer_list<std::string> b, std::initializer_list<std::string> c, double tol) {
  return is_markov_chain(d, std::span<const std::string>(a.begin(), a.size()),
                         std::span<const std::string>(b.begin(), b.size()),
                         std::span<const std::string>(c.begin(), c.size()), tol);
}

}  // namespace casvm

#include "casvm/fme.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace casvm::fme {

namespace {

long long checked(__int128 v, const char* what) {
  if (v > static_cast<__int128>(9223372036854775807LL) || v < -static_cast<__int128>(9223372036854775807LL))
    throw std::overflow_error(std::string("rational overflow in ") + what);
  return static_cast<long long>(v);
}

}  // namespace

Rational::Rational(long long num, long long den) : num_(num), den_(den) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational operator+(const Rational& a, const Rational& b) {
  const __int128 num = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
  const __int128 den = static_cast<__int128>(a.den_) * b.den_;
  return Rational(checked(num, "+"), checked(den, "+"));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  const __int128 num = static_cast<__int128>(a.num_) * b.num_;
  const __int128 den = static_cast<__int128>(a.den_) * b.den_;
  return Rational(checked(num, "*"), checked(den, "*"));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::invalid_argument("rational division by zero");
  const __int128 num = static_cast<__int128>(a.num_) * b.den_;
  const __int128 den = static_cast<__int128>(a.den_) * b.num_;
  return Rational(checked(num, "/"), checked(den, "/"));
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::size_t InequalitySystem::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return i;
  throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
}

std::size_t InequalitySystem::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i] == name) return i;
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

namespace {

// row * scale + other * other_scale, combined in place on a fresh row
Inequality combine(const Inequality& a, const Rational& sa, const Inequality& b, const Rational& sb) {
  Inequality r;
  r.var_coeffs.resize(a.var_coeffs.size());
  r.param_coeffs.resize(a.param_coeffs.size());
  for (std::size_t i = 0; i < r.var_coeffs.size(); ++i)
    r.var_coeffs[i] = a.var_coeffs[i] * sa + b.var_coeffs[i] * sb;
  for (std::size_t i = 0; i < r.param_coeffs.size(); ++i)
    r.param_coeffs[i] = a.param_coeffs[i] * sa + b.param_coeffs[i] * sb;
  r.constant = a.constant * sa + b.constant * sb;
  r.strict = a.strict || b.strict;
  return r;
}

// scale a row so every coefficient is an integer and their gcd is 1
void normalize(Inequality& r) {
  long long lcm = 1;
  const auto fold_lcm = [&](const Rational& q) {
    if (!q.is_zero()) lcm = checked(static_cast<__int128>(lcm) / std::gcd(lcm, q.den()) * q.den(), "lcm");
  };
  for (const auto& q : r.var_coeffs) fold_lcm(q);
  for (const auto& q : r.param_coeffs) fold_lcm(q);
  fold_lcm(r.constant);
  long long g = 0;
  const auto scale_and_gcd = [&](Rational& q) {
    q = q * Rational(lcm);
    g = std::gcd(g, q.num() < 0 ? -q.num() : q.num());
  };
  for (auto& q : r.var_coeffs) scale_and_gcd(q);
  for (auto& q : r.param_coeffs) scale_and_gcd(q);
  scale_and_gcd(r.constant);
  if (g > 1) {
    const Rational inv(1, g);
    for (auto& q : r.var_coeffs) q = q * inv;
    for (auto& q : r.param_coeffs) q = q * inv;
    r.constant = r.constant * inv;
  }
}

bool rows_equal(const Inequality& a, const Inequality& b) {
  return a.strict == b.strict && a.constant == b.constant && a.var_coeffs == b.var_coeffs &&
         a.param_coeffs == b.param_coeffs;
}

// true when nonnegativity of variables and parameters alone already implies
// the row: every variable coefficient >= 0 and the right side <= 0 termwise
bool ambient_trivial(const Inequality& r) {
  if (r.strict) return false;
  for (const auto& q : r.var_coeffs)
    if (q.negative()) return false;
  for (const auto& q : r.param_coeffs)
    if (q.positive()) return false;
  return !r.constant.positive();
}

void cleanup(std::vector<Inequality>& rows) {
  for (auto& r : rows) normalize(r);
  std::vector<Inequality> kept;
  for (auto& r : rows) {
    if (ambient_trivial(r)) continue;
    bool dup = false;
    for (const auto& k : kept)
      if (rows_equal(r, k)) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(r));
  }
  rows = std::move(kept);
}

std::vector<Inequality> eliminate_one(const std::vector<Inequality>& rows, std::size_t v,
                                      std::size_t row_cap) {
  std::vector<const Inequality*> lowers, uppers;
  std::vector<Inequality> out;
  for (const auto& r : rows) {
    if (r.var_coeffs[v].is_zero())
      out.push_back(r);
    else if (r.var_coeffs[v].positive())
      lowers.push_back(&r);
    else
      uppers.push_back(&r);
  }
  // implicit v >= 0 acts as one more lower bound: each upper row survives
  // with its v term dropped
  for (const auto* u : uppers) {
    Inequality r = *u;
    r.var_coeffs[v] = Rational(0);
    out.push_back(std::move(r));
  }
  for (const auto* l : lowers)
    for (const auto* u : uppers) {
      // cancel v: l * |u_v| + u * l_v
      Rational su = l->var_coeffs[v];
      Rational sl = -(u->var_coeffs[v]);
      Inequality r = combine(*l, sl, *u, su);
      out.push_back(std::move(r));
      if (out.size() > row_cap)
        throw std::runtime_error("Fourier-Motzkin elimination exceeded the row cap of " +
                                 std::to_string(row_cap));
    }
  cleanup(out);
  if (out.size() > row_cap)
    throw std::runtime_error("Fourier-Motzkin elimination exceeded the row cap of " + std::to_string(row_cap));
  return out;
}

}  // namespace

InequalitySystem fme_eliminate(const InequalitySystem& sys, const std::vector<std::string>& drop,
                               std::size_t row_cap) {
  std::vector<bool> dropped(sys.variables.size(), false);
  std::vector<Inequality> rows = sys.rows;
  cleanup(rows);
  for (const auto& name : drop) {
    const std::size_t v = sys.var_index(name);
    if (dropped[v]) throw std::invalid_argument("variable '" + name + "' listed twice");
    dropped[v] = true;
    rows = eliminate_one(rows, v, row_cap);
  }

  // compact the remaining variables
  InequalitySystem out;
  out.parameters = sys.parameters;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < sys.variables.size(); ++i)
    if (!dropped[i]) {
      keep.push_back(i);
      out.variables.push_back(sys.variables[i]);
    }
  for (auto& r : rows) {
    Inequality nr;
    nr.param_coeffs = r.param_coeffs;
    nr.constant = r.constant;
    nr.strict = r.strict;
    nr.var_coeffs.reserve(keep.size());
    for (std::size_t i : keep) nr.var_coeffs.push_back(r.var_coeffs[i]);
    out.rows.push_back(std::move(nr));
  }
  return out;
}

Rational ParameterSampler::next() {
  // xorshift-style step, then a small nonnegative rational k/8 with k <= 80
  state_ ^= state_ << 13;
  state_ ^= state_ >> 7;
  state_ ^= state_ << 17;
  return Rational(static_cast<long long>(state_ % 81), 8);
}

namespace {

// numeric rows over variables only (parameters already substituted)
struct NumericRow {
  std::vector<Rational> coeffs;
  Rational rhs;
  bool strict = false;
};

NumericRow instantiate(const Inequality& r, const std::vector<Rational>& params) {
  NumericRow n;
  n.coeffs = r.var_coeffs;
  n.rhs = r.constant;
  for (std::size_t i = 0; i < params.size(); ++i) n.rhs = n.rhs + r.param_coeffs[i] * params[i];
  n.strict = r.strict;
  return n;
}

// feasibility of { rows, all vars >= 0 } over the rationals, by full
// elimination with strictness tracking
bool numeric_feasible(std::vector<NumericRow> rows, std::size_t n_vars) {
  for (std::size_t v = 0; v < n_vars; ++v) {
    std::vector<NumericRow> next;
    std::vector<const NumericRow*> lowers, uppers;
    for (const auto& r : rows) {
      if (r.coeffs[v].is_zero())
        next.push_back(r);
      else if (r.coeffs[v].positive())
        lowers.push_back(&r);
      else
        uppers.push_back(&r);
    }
    for (const auto* u : uppers) {
      NumericRow r = *u;
      r.coeffs[v] = Rational(0);
      next.push_back(std::move(r));
    }
    for (const auto* l : lowers)
      for (const auto* u : uppers) {
        const Rational sl = -(u->coeffs[v]);
        const Rational su = l->coeffs[v];
        NumericRow r;
        r.coeffs.resize(l->coeffs.size());
        for (std::size_t i = 0; i < r.coeffs.size(); ++i)
          r.coeffs[i] = l->coeffs[i] * sl + u->coeffs[i] * su;
        r.rhs = l->rhs * sl + u->rhs * su;
        r.strict = l->strict || u->strict;
        next.push_back(std::move(r));
      }
    rows = std::move(next);
    if (rows.size() > 200000)
      throw std::runtime_error("feasibility check exceeded the internal row limit");
  }
  for (const auto& r : rows) {
    // ground fact: 0 >= rhs (or 0 > rhs when strict)
    if (r.strict ? !r.rhs.negative() : r.rhs.positive()) return false;
  }
  return true;
}

// negation of (lhs >= rhs): lhs < rhs, i.e. -lhs > -rhs
NumericRow negate(const NumericRow& r) {
  NumericRow n;
  n.coeffs.reserve(r.coeffs.size());
  for (const auto& c : r.coeffs) n.coeffs.push_back(-c);
  n.rhs = -r.rhs;
  n.strict = true;
  return n;
}

bool implied(const NumericRow& row, const std::vector<NumericRow>& others, std::size_t n_vars) {
  std::vector<NumericRow> sys = others;
  sys.push_back(negate(row));
  return !numeric_feasible(std::move(sys), n_vars);
}

std::vector<Rational> sample_params(ParameterSampler& sampler, std::size_t n) {
  std::vector<Rational> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(sampler.next());
  return v;
}

}  // namespace

RedundancyResult remove_redundant(const InequalitySystem& sys, std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::size_t n = sys.rows.size();
  std::vector<bool> live(n, true);

  // one candidate at a time, checked against the currently retained rows
  for (std::size_t cand = 0; cand < n; ++cand) {
    ParameterSampler sampler(seed + 0x51ed2700 + cand);
    bool redundant_everywhere = true;
    for (int t = 0; t < trials && redundant_everywhere; ++t) {
      const auto params = sample_params(sampler, sys.parameters.size());
      std::vector<NumericRow> others;
      for (std::size_t i = 0; i < n; ++i)
        if (live[i] && i != cand) others.push_back(instantiate(sys.rows[i], params));
      if (!implied(instantiate(sys.rows[cand], params), others, sys.variables.size()))
        redundant_everywhere = false;
    }
    if (redundant_everywhere) live[cand] = false;
  }

  RedundancyResult out;
  out.system.variables = sys.variables;
  out.system.parameters = sys.parameters;
  for (std::size_t i = 0; i < n; ++i) {
    if (live[i])
      out.system.rows.push_back(sys.rows[i]);
    else
      out.dropped.push_back(i);
  }
  return out;
}

namespace {

std::string describe_sample(const std::vector<std::string>& names, const std::vector<Rational>& vals) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ", ";
    s += names[i] + "=" + vals[i].str();
  }
  return s;
}

std::string row_text(const InequalitySystem& sys, const Inequality& r);

}  // namespace

EquivalenceReport verify_region_equivalence(const InequalitySystem& a, const InequalitySystem& b,
                                            std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(a.variables) != sorted(b.variables))
    throw std::invalid_argument("systems project onto different variable sets");

  // shared parameter order: union of both systems' parameter names
  std::vector<std::string> params = a.parameters;
  for (const auto& p : b.parameters)
    if (std::find(params.begin(), params.end(), p) == params.end()) params.push_back(p);

  // b's rows remapped to a's variable order
  std::vector<std::size_t> bmap(b.variables.size());
  for (std::size_t i = 0; i < b.variables.size(); ++i) bmap[i] = a.var_index(b.variables[i]);

  const auto lift = [&](const Inequality& r, const InequalitySystem& owner, bool remap) {
    Inequality out;
    out.var_coeffs.assign(a.variables.size(), Rational(0));
    for (std::size_t i = 0; i < r.var_coeffs.size(); ++i)
      out.var_coeffs[remap ? bmap[i] : i] = r.var_coeffs[i];
    out.param_coeffs.assign(params.size(), Rational(0));
    for (std::size_t i = 0; i < r.param_coeffs.size(); ++i) {
      const auto it = std::find(params.begin(), params.end(), owner.parameters[i]);
      out.param_coeffs[it - params.begin()] = r.param_coeffs[i];
    }
    out.constant = r.constant;
    return out;
  };

  std::vector<Inequality> ra, rb;
  for (const auto& r : a.rows) ra.push_back(lift(r, a, false));
  for (const auto& r : b.rows) rb.push_back(lift(r, b, true));

  EquivalenceReport report;
  report.trials = trials;
  ParameterSampler sampler(seed);
  for (int t = 0; t < trials; ++t) {
    const auto vals = sample_params(sampler, params.size());
    std::vector<NumericRow> na, nb;
    for (const auto& r : ra) na.push_back(instantiate(r, vals));
    for (const auto& r : rb) nb.push_back(instantiate(r, vals));
    for (std::size_t i = 0; i < na.size(); ++i)
      if (!implied(na[i], nb, a.variables.size())) {
        report.counterexample = "sample #" + std::to_string(t) + " (" + describe_sample(params, vals) +
                                "): second system does not imply '" + row_text(a, a.rows[i]) + "'";
        return report;
      }
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (!implied(nb[i], na, a.variables.size())) {
        report.counterexample = "sample #" + std::to_string(t) + " (" + describe_sample(params, vals) +
                                "): first system does not imply '" + row_text(b, b.rows[i]) + "'";
        return report;
      }
  }
  report.equivalent = true;
  return report;
}

// ---------------------------------------------------------------------------
// text format

namespace {

struct Token {
  enum Kind { ident, number, plus, minus, star, geq, leq, end } kind;
  std::string text;
};

std::vector<Token> lex(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '+') {
      out.push_back({Token::plus, "+"});
      ++i;
    } else if (c == '-') {
      out.push_back({Token::minus, "-"});
      ++i;
    } else if (c == '*') {
      out.push_back({Token::star, "*"});
      ++i;
    } else if (c == '>' && i + 1 < line.size() && line[i + 1] == '=') {
      out.push_back({Token::geq, ">="});
      i += 2;
    } else if (c == '<' && i + 1 < line.size() && line[i + 1] == '=') {
      out.push_back({Token::leq, "<="});
      i += 2;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '/')) ++j;
      out.push_back({Token::number, std::string(line.substr(i, j - i))});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
        ++j;
      out.push_back({Token::ident, std::string(line.substr(i, j - i))});
      i = j;
    } else {
      throw std::invalid_argument("unexpected character '" + std::string(1, c) + "' in inequality");
    }
  }
  out.push_back({Token::end, ""});
  return out;
}

Rational parse_number(const std::string& text) {
  const auto parse_ll = [](const std::string& s) {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_ll(text));
  return Rational(parse_ll(text.substr(0, slash)), parse_ll(text.substr(slash + 1)));
}

// one side of an inequality: +/- [coeff *] (ident | number)
struct SideExpr {
  std::vector<std::pair<std::string, Rational>> named;
  Rational constant;
};

SideExpr parse_side(const std::vector<Token>& tokens, std::size_t& pos, Token::Kind stop1, Token::Kind stop2) {
  SideExpr side;
  bool first = true;
  while (tokens[pos].kind != stop1 && tokens[pos].kind != stop2) {
    Rational sign(1);
    if (tokens[pos].kind == Token::plus || tokens[pos].kind == Token::minus) {
      if (tokens[pos].kind == Token::minus) sign = Rational(-1);
      ++pos;
    } else if (!first) {
      throw std::invalid_argument("expected '+' or '-' between terms");
    }
    first = false;
    Rational coeff = sign;
    std::string name;
    if (tokens[pos].kind == Token::number) {
      coeff = sign * parse_number(tokens[pos].text);
      ++pos;
      if (tokens[pos].kind == Token::star) {
        ++pos;
        if (tokens[pos].kind != Token::ident) throw std::invalid_argument("expected identifier after '*'");
        name = tokens[pos].text;
        ++pos;
      }
    } else if (tokens[pos].kind == Token::ident) {
      name = tokens[pos].text;
      ++pos;
    } else {
      throw std::invalid_argument("expected a term");
    }
    if (name.empty())
      side.constant = side.constant + coeff;
    else
      side.named.emplace_back(std::move(name), coeff);
  }
  return side;
}

}  // namespace

InequalitySystem parse_system(std::string_view text) {
  InequalitySystem sys;
  bool declared = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string_view line(raw);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;

    const auto read_names = [&](std::string_view rest, std::vector<std::string>& into) {
      std::istringstream ns{std::string(rest)};
      std::string n;
      while (ns >> n) into.push_back(n);
    };
    if (line.starts_with("vars:")) {
      read_names(line.substr(5), sys.variables);
      declared = true;
      continue;
    }
    if (line.starts_with("params:")) {
      read_names(line.substr(7), sys.parameters);
      declared = true;
      continue;
    }
    if (!declared) throw std::invalid_argument("inequality before vars:/params: declarations");

    const auto tokens = lex(line);
    std::size_t pos = 0;
    const SideExpr lhs = parse_side(tokens, pos, Token::geq, Token::leq);
    const bool flipped = tokens[pos].kind == Token::leq;
    ++pos;
    const SideExpr rhs = parse_side(tokens, pos, Token::end, Token::end);

    Inequality row;
    row.var_coeffs.assign(sys.variables.size(), Rational(0));
    row.param_coeffs.assign(sys.parameters.size(), Rational(0));
    const auto add = [&](const SideExpr& side, const Rational& sgn) {
      for (const auto& [name, coeff] : side.named) {
        const auto vit = std::find(sys.variables.begin(), sys.variables.end(), name);
        if (vit != sys.variables.end()) {
          row.var_coeffs[vit - sys.variables.begin()] =
              row.var_coeffs[vit - sys.variables.begin()] + coeff * sgn;
          continue;
        }
        const auto pit = std::find(sys.parameters.begin(), sys.parameters.end(), name);
        if (pit == sys.parameters.end())
          throw std::invalid_argument("undeclared identifier '" + name + "'");
        // parameters live on the right-hand side
        row.param_coeffs[pit - sys.parameters.begin()] =
            row.param_coeffs[pit - sys.parameters.begin()] - coeff * sgn;
      }
      row.constant = row.constant - side.constant * sgn;
    };
    // lhs >= rhs  <=>  lhs - rhs >= 0 with vars kept left, params/consts right
    add(lhs, flipped ? Rational(-1) : Rational(1));
    add(rhs, flipped ? Rational(1) : Rational(-1));
    sys.rows.push_back(std::move(row));
  }
  if (sys.variables.empty()) throw std::invalid_argument("system declares no variables");
  return sys;
}

namespace {

void append_combo(std::string& s, const std::vector<Rational>& coeffs, const std::vector<std::string>& names,
                  bool& any) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].is_zero()) continue;
    Rational c = coeffs[i];
    if (any) {
      s += c.negative() ? " - " : " + ";
      if (c.negative()) c = -c;
    } else if (c.negative()) {
      s += "-";
      c = -c;
    }
    any = true;
    if (!(c == Rational(1))) s += c.str() + "*";
    s += names[i];
  }
}

std::string row_text(const InequalitySystem& sys, const Inequality& r) {
  std::string s;
  bool any = false;
  append_combo(s, r.var_coeffs, sys.variables, any);
  if (!any) s += "0";
  s += r.strict ? " > " : " >= ";
  std::string rhs;
  bool any_r = false;
  append_combo(rhs, r.param_coeffs, sys.parameters, any_r);
  if (!r.constant.is_zero() || !any_r) {
    if (any_r) rhs += r.constant.negative() ? " - " + (-r.constant).str() : " + " + r.constant.str();
    else rhs += r.constant.str();
  }
  return s + rhs;
}

}  // namespace

std::string to_text(const InequalitySystem& sys) {
  std::string out = "vars:";
  for (const auto& v : sys.variables) out += " " + v;
  out += "\nparams:";
  for (const auto& p : sys.parameters) out += " " + p;
  out += "\n";
  for (const auto& r : sys.rows) {
    // re-emit as lhs >= rhs; strict rows never appear in public systems
    std::string line = row_text(sys, r);
    const auto gt = line.find(" > ");
    if (gt != std::string::npos) line.replace(gt, 3, " >= ");
    out += line + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// bundled systems

namespace {

constexpr const char* kProp2 = R"(# rate splitting for the lossless cascade-broadcast region
vars: R1 R2 Rb r1b r1d r2b r2d
params: IXA HXAY HXAZ
r2b + r2d + r1b >= HXAZ
r1b + r1d >= HXAY
R1 >= r1d
R2 >= r2d
Rb >= r1b + r2b + IXA
)";

constexpr const char* kProp2Target = R"(# projected lossless cascade-broadcast region
vars: R1 R2 Rb
params: IXA HXAY HXAZ
Rb >= IXA
R1 + Rb >= IXA + HXAY
R2 + Rb >= IXA + HXAZ
)";

constexpr const char* kProp2TargetMutated = R"(# negative control: last bound carries the wrong side information term
vars: R1 R2 Rb
params: IXA HXAY HXAZ
Rb >= IXA
R1 + Rb >= IXA + HXAY
R2 + Rb >= IXA + HXAY
)";

constexpr const char* kProp3 = R"(# rate splitting for the common-reconstruction cascade-broadcast region
vars: R1 R2 Rb r0b r0d r1b r1d r2b r2d
params: IXA IX2AZ IX2AY IX1AYX2
r0b + r0d + r2b >= IX2AZ
r2b + r2d >= IX2AY
r1b + r1d >= IX1AYX2
R1 >= r1d + r2d
R2 >= r0d
Rb >= r1b + r2b + r0b + IXA
)";

// The combined description term I(X; Xh1, Xh2 | A, Y) splits by the chain
// rule into IX2AY + IX1AYX2; the projection can only see the split form.
constexpr const char* kProp3Target = R"(# projected common-reconstruction region
vars: R1 R2 Rb
params: IXA IX2AZ IX2AY IX1AYX2
Rb >= IXA
R1 + Rb >= IXA + IX2AY + IX1AYX2
R2 + Rb >= IXA + IX2AZ
R1 + R2 + Rb >= IXA + IX2AZ + IX1AYX2
)";

}  // namespace

InequalitySystem builtin_system(Builtin which) {
  switch (which) {
    case Builtin::prop2:
      return parse_system(kProp2);
    case Builtin::prop2_target:
      return parse_system(kProp2Target);
    case Builtin::prop2_target_mutated:
      return parse_system(kProp2TargetMutated);
    case Builtin::prop3:
      return parse_system(kProp3);
    case Builtin::prop3_target:
      return parse_system(kProp3Target);
  }
  throw std::invalid_argument("unknown builtin system");
}

std::vector<std::string> builtin_split_variables(Builtin which) {
  switch (which) {
    case Builtin::prop2:
    case Builtin::prop2_target:
    case Builtin::prop2_target_mutated:
      return {"r1b", "r1d", "r2b", "r2d"};
    case Builtin::prop3:
    case Builtin::prop3_target:
      return {"r0b", "r0d", "r1b", "r1d", "r2b", "r2d"};
  }
  throw std::invalid_argument("unknown builtin system");
}

Builtin builtin_from_name(std::string_view name) {
  if (name == "prop2") return Builtin::prop2;
  if (name == "prop3") return Builtin::prop3;
  if (name == "prop2-mutated") return Builtin::prop2_target_mutated;
  throw std::invalid_argument("unknown builtin '" + std::string(name) + "' (expected prop2, prop3, or prop2-mutated)");
}

}  // namespace casvm::fme

#include "casvm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "casvm/broadcast.hpp"
#include "casvm/cascade.hpp"
#include "casvm/fme.hpp"
#include "casvm/oracle.hpp"
#include "casvm/prob.hpp"
#include "casvm/rng.hpp"

namespace casvm::cli {

namespace {

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& cols) { line(cols); }
  void row(const std::vector<std::string>& cols) { line(cols); }
  static std::string num(double v) { return format_g9(v); }

 private:
  void line(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out_ << ',';
      out_ << cols[i];
    }
    out_ << '\n';
  }
  std::ostream& out_;
};

}  // namespace

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s != sections.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw std::invalid_argument("config is missing '" + (section.empty() ? key : section + "." + key) + "'");
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw, section;
  while (std::getline(in, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("empty key in config line: " + line);
    if (!cfg.sections[section].emplace(key, value).second)
      throw std::invalid_argument("duplicate config key '" + key + "'");
  }
  // canonical serialization: sections and keys in sorted order
  std::string canon;
  for (const auto& [sec, kv] : cfg.sections)
    for (const auto& [k, v] : kv) canon += sec + "." + k + "=" + v + "\n";
  cfg.canonical = std::move(canon);
  return cfg;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_hash(const Config& cfg, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const char c : cfg.canonical) mix(static_cast<unsigned char>(c));
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  if (pos != t.size()) throw std::invalid_argument("trailing characters in number: '" + t + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    // lo:hi:steps, endpoints included
    std::istringstream in(t);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c))
      throw std::invalid_argument("range must be lo:hi:steps");
    const double lo = parse_double(a), hi = parse_double(b);
    const int steps = static_cast<int>(parse_double(c));
    if (steps < 1) throw std::invalid_argument("range needs at least one step");
    std::vector<double> out;
    out.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) out.push_back(lo + (hi - lo) * i / steps);
    return out;
  }
  std::istringstream in(t);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok));
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

namespace {

std::vector<std::size_t> parse_shape(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text)) {
    if (v < 1 || v != std::floor(v)) throw std::invalid_argument("shape entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> section_table(const Config& cfg, const std::string& section, const std::string& key,
                                  std::size_t expected) {
  const auto values = parse_double_list(cfg.get(section, key));
  if (values.size() != expected)
    throw std::invalid_argument("[" + section + "] " + key + " has " + std::to_string(values.size()) +
                                " entries, expected " + std::to_string(expected));
  return values;
}

DistortionTable distortion_from_config(const Config& cfg, const std::string& section, std::size_t nx) {
  if (!cfg.has(section, "table")) return DistortionTable::hamming(nx);
  const auto shape = parse_shape(cfg.get(section, "shape"));
  if (shape.size() != 2 || shape[0] != nx)
    throw std::invalid_argument("[" + section + "] shape must be |X| x |recon|");
  DistortionTable t;
  t.source_size = shape[0];
  t.recon_size = shape[1];
  t.d = section_table(cfg, section, "table", shape[0] * shape[1]);
  return t;
}

CostTable cost_from_config(const Config& cfg, std::size_t na) {
  CostTable c;
  c.lambda = parse_double_list(cfg.get("cost", "lambda"));
  if (c.lambda.size() != na) throw std::invalid_argument("[cost] lambda must list one entry per action");
  return c;
}

void reject_builtin_overrides(const Config& cfg) {
  for (const char* sec : {"source", "vm", "cost", "distortion1", "distortion2"})
    if (cfg.sections.count(sec))
      throw std::invalid_argument(std::string("builtin models reject a [") + sec + "] override");
}

}  // namespace

CascadeModel build_cascade_model(const Config& cfg) {
  const auto sshape = parse_shape(cfg.get("source", "shape"));
  if (sshape.size() != 2) throw std::invalid_argument("[source] shape must be |X| |Y| for the cascade");
  const std::size_t nx = sshape[0], ny = sshape[1];
  JointDistribution source({{"x", nx}, {"y", ny}}, section_table(cfg, "source", "mass", nx * ny));

  const auto vshape = parse_shape(cfg.get("vm", "shape"));
  if (vshape.size() != 3 || vshape[1] != ny)
    throw std::invalid_argument("[vm] shape must be |A| |Y| |Z| for the cascade");
  const std::size_t na = vshape[0], nz = vshape[2];
  ConditionalChannel vm({{"a", na}, {"y", ny}}, {{"z", nz}},
                        section_table(cfg, "vm", "mass", na * ny * nz));

  CascadeModel m{std::move(source), std::move(vm), cost_from_config(cfg, na),
                 distortion_from_config(cfg, "distortion1", nx), distortion_from_config(cfg, "distortion2", nx)};
  return validate(std::move(m));
}

BroadcastModel build_broadcast_model(const Config& cfg) {
  const auto sshape = parse_shape(cfg.get("source", "shape"));
  if (sshape.size() != 1) throw std::invalid_argument("[source] shape must be |X| for broadcast topologies");
  const std::size_t nx = sshape[0];
  JointDistribution source({{"x", nx}}, section_table(cfg, "source", "mass", nx));

  const auto vshape = parse_shape(cfg.get("vm", "shape"));
  if (vshape.size() != 4 || vshape[1] != nx)
    throw std::invalid_argument("[vm] shape must be |A| |X| |Y| |Z| for broadcast topologies");
  const std::size_t na = vshape[0], ny = vshape[2], nz = vshape[3];
  ConditionalChannel vm({{"a", na}, {"x", nx}}, {{"y", ny}, {"z", nz}},
                        section_table(cfg, "vm", "mass", na * nx * ny * nz));

  BroadcastModel m{std::move(source),
                   std::move(vm),
                   cost_from_config(cfg, na),
                   distortion_from_config(cfg, "distortion1", nx),
                   distortion_from_config(cfg, "distortion2", nx),
                   cfg.get_or("", "degraded", "false") == "true"};
  return validate(std::move(m));
}

SwitchingModel build_switching_model(const Config& cfg) {
  const std::string builtin = cfg.get_or("", "builtin", "");
  if (!builtin.empty()) {
    reject_builtin_overrides(cfg);
    const double delta = parse_double(cfg.get_or("sweep", "delta", "0.6"));
    if (delta < 0 || delta > 1) throw std::invalid_argument("delta must lie in [0,1]");
    if (builtin == "bsc-example") {
      SwitchingModel m{JointDistribution({{"x", 2}, {"w", 2}},
                                         {(1 - delta) / 2, delta / 2, delta / 2, (1 - delta) / 2}),
                       {kForbiddenCost, 1.0, 1.0, kForbiddenCost}};
      return validate(std::move(m));
    }
    if (builtin == "s-channel-example") {
      SwitchingModel m{JointDistribution({{"x", 2}, {"w", 2}},
                                         {(1 - delta) / 2, delta / 2, 0.0, 0.5}),
                       {kForbiddenCost, 1.0, 0.0, kForbiddenCost}};
      return validate(std::move(m));
    }
    throw std::invalid_argument("unknown builtin '" + builtin +
                                "' (expected bsc-example or s-channel-example)");
  }
  const auto sshape = parse_shape(cfg.get("source", "shape"));
  if (sshape.size() != 2) throw std::invalid_argument("[source] shape must be |X| |W| for switching");
  const std::size_t nx = sshape[0], nw = sshape[1];
  JointDistribution source({{"x", nx}, {"w", nw}}, section_table(cfg, "source", "mass", nx * nw));
  const auto lam = parse_double_list(cfg.get("cost", "lambda"));
  if (lam.size() != 4) throw std::invalid_argument("[cost] lambda must list four switching actions");
  SwitchingModel m{std::move(source), {lam[0], lam[1], lam[2], lam[3]}};
  return validate(std::move(m));
}

namespace {

ConditionalChannel action_from_config(const Config& cfg, std::vector<Alphabet> from, std::size_t na) {
  const auto shape = parse_shape(cfg.get("action", "shape"));
  std::size_t cells = 1;
  for (const auto& a : from) cells *= a.size;
  std::size_t expect_cells = 1;
  for (std::size_t i = 0; i + 1 < shape.size(); ++i) expect_cells *= shape[i];
  if (shape.empty() || shape.back() != na || expect_cells != cells)
    throw std::invalid_argument("[action] shape does not match the model");
  return ConditionalChannel(std::move(from), {{"a", na}},
                            section_table(cfg, "action", "mass", cells * na));
}

SearchConfig search_from_config(const Config& cfg, std::uint64_t seed) {
  SearchConfig s;
  s.seed = seed;
  s.starts = static_cast<int>(parse_double(cfg.get_or("search", "starts", "64")));
  s.sweeps = static_cast<int>(parse_double(cfg.get_or("search", "sweeps", "200")));
  s.warm_sweeps = static_cast<int>(parse_double(cfg.get_or("search", "warm_sweeps", "12")));
  s.u_size = static_cast<std::size_t>(parse_double(cfg.get_or("search", "u_size", "0")));
  s.vertex_seeds = cfg.get_or("search", "vertex_seeds", "true") == "true";
  s.vertex_cap = static_cast<std::uint64_t>(parse_double(cfg.get_or("search", "vertex_cap", "8192")));
  s.vertex_keep = static_cast<int>(parse_double(cfg.get_or("search", "vertex_keep", "16")));
  return s;
}

CostBudget cost_budget_from_config(const Config& cfg) {
  CostBudget b;
  b.gamma = parse_double(cfg.get_or("budget", "gamma", "inf"));
  if (b.gamma < 0) throw std::invalid_argument("gamma must be >= 0");
  return b;
}

DistortionBudget dist_budget_from_config(const Config& cfg) {
  DistortionBudget b;
  b.d1 = parse_double(cfg.get_or("budget", "d1", "inf"));
  b.d2 = parse_double(cfg.get_or("budget", "d2", "inf"));
  if (b.d1 < 0 || b.d2 < 0) throw std::invalid_argument("distortion budgets must be >= 0");
  return b;
}

CRTestChannel cr_channel_from_config(const Config& cfg, const BroadcastModel& m) {
  ConditionalChannel action = action_from_config(cfg, {{"x", m.x().size}}, m.a().size);
  const auto rshape = parse_shape(cfg.get("recon", "shape"));
  if (rshape.size() != 4 || rshape[0] != m.x().size || rshape[1] != m.a().size ||
      rshape[2] != m.d1.recon_size || rshape[3] != m.d2.recon_size)
    throw std::invalid_argument("[recon] shape must be |X| |A| |Xh1| |Xh2|");
  ConditionalChannel recon(
      {{"x", m.x().size}, {"a", m.a().size}}, {{"xh1", rshape[2]}, {"xh2", rshape[3]}},
      section_table(cfg, "recon", "mass", rshape[0] * rshape[1] * rshape[2] * rshape[3]));
  return CRTestChannel{std::move(action), std::move(recon)};
}

int eval_switching_rows(const Config& cfg, const std::string& hash, Csv& csv) {
  const SwitchingModel m = build_switching_model(cfg);
  const std::string builtin = cfg.get_or("", "builtin", "");
  const auto deltas = cfg.has("sweep", "delta") ? parse_double_list(cfg.get("sweep", "delta"))
                                                : std::vector<double>{0.6};

  if (builtin == "bsc-example") {
    const auto qs =
        cfg.has("sweep", "q") ? parse_double_list(cfg.get("sweep", "q")) : parse_double_list("0:1:20");
    csv.header({"config_hash", "topology", "q", "delta", "rb_min", "r1_plus_rb", "r2_plus_rb", "cost"});
    for (const double delta : deltas)
      for (const double q : qs) {
        const auto p = eval_bsc_closed_form(q, delta);
        csv.row({hash, "switching-bsc", Csv::num(q), Csv::num(delta), Csv::num(p.rb_min),
                 Csv::num(p.r1_plus_rb_min), Csv::num(p.r2_plus_rb_min), Csv::num(p.cost)});
      }
    return kExitOk;
  }
  if (builtin == "s-channel-example") {
    const auto alphas = cfg.has("sweep", "alpha") ? parse_double_list(cfg.get("sweep", "alpha"))
                                                  : parse_double_list("0:1:20");
    const auto betas = cfg.has("sweep", "beta") ? parse_double_list(cfg.get("sweep", "beta"))
                                                : parse_double_list("0:1:20");
    csv.header({"config_hash", "topology", "alpha", "beta", "delta", "rb_min", "r1_plus_rb", "r2_plus_rb",
                "cost"});
    for (const double delta : deltas)
      for (const double a : alphas)
        for (const double b : betas) {
          const auto p = eval_schannel_closed_form(a, b, delta);
          csv.row({hash, "switching-schannel", Csv::num(a), Csv::num(b), Csv::num(delta), Csv::num(p.rb_min),
                   Csv::num(p.r1_plus_rb_min), Csv::num(p.r2_plus_rb_min), Csv::num(p.cost)});
        }
    return kExitOk;
  }

  // custom switching model: explicit [action] p(a|x), or alpha/beta sweeps
  csv.header({"config_hash", "topology", "alpha", "beta", "rb_min", "r1_plus_rb", "r2_plus_rb", "cost"});
  if (cfg.sections.count("action")) {
    const auto action = action_from_config(cfg, {{"x", m.x().size}}, 4);
    const auto p = eval_switching(m, action);
    if (std::isinf(p.cost)) throw InfeasibleError("action channel puts mass on a forbidden action");
    csv.row({hash, "switching", "", "", Csv::num(p.rb_min), Csv::num(p.r1_plus_rb_min),
             Csv::num(p.r2_plus_rb_min), Csv::num(p.cost)});
    return kExitOk;
  }
  const auto alphas = parse_double_list(cfg.get("sweep", "alpha"));
  const auto betas = parse_double_list(cfg.get("sweep", "beta"));
  for (const double a : alphas)
    for (const double b : betas) {
      const auto p = eval_switching(m, switching_action_channel(m, a, b));
      csv.row({hash, "switching", Csv::num(a), Csv::num(b), Csv::num(p.rb_min), Csv::num(p.r1_plus_rb_min),
               Csv::num(p.r2_plus_rb_min), Csv::num(p.cost)});
    }
  return kExitOk;
}

}  // namespace

int cmd_eval(const Config& cfg, const CommonOptions& opt, std::ostream& out) {
  Csv csv(out);
  const std::string hash = config_hash(cfg, opt.seed);
  const std::string topology = cfg.get("", "topology");

  if (topology == "switching") return eval_switching_rows(cfg, hash, csv);

  if (topology == "cascade") {
    const CascadeModel m = build_cascade_model(cfg);
    csv.header({"config_hash", "topology", "kind", "r1_min", "r2_min", "d1", "d2", "cost"});
    if (cfg.sections.count("test_channel")) {
      const auto shape = parse_shape(cfg.get("test_channel", "shape"));
      if (shape.size() != 5 || shape[0] != m.x().size || shape[1] != m.y().size)
        throw std::invalid_argument("[test_channel] shape must be |X| |Y| |Xh1| |A| |U|");
      if (shape[4] > cascade_u_bound(m))
        throw std::invalid_argument("[test_channel] auxiliary alphabet exceeds the cardinality bound |X||Y||A|+3");
      ConditionalChannel ch({{"x", shape[0]}, {"y", shape[1]}},
                            {{"xh1", shape[2]}, {"a", shape[3]}, {"u", shape[4]}},
                            section_table(cfg, "test_channel", "mass",
                                          shape[0] * shape[1] * shape[2] * shape[3] * shape[4]));
      CascadeTestChannel t{ch, {}};
      if (cfg.has("test_channel", "decode")) {
        for (double v : parse_double_list(cfg.get("test_channel", "decode")))
          t.decode.push_back(static_cast<std::size_t>(v));
      } else {
        t.decode = optimal_cascade_decode(m, ch);
      }
      const auto p = eval_cascade_point(m, t);
      if (std::isinf(p.cost)) throw InfeasibleError("test channel puts mass on a forbidden action");
      csv.row({hash, "cascade", "point", Csv::num(p.r1_min), Csv::num(p.r2_min), Csv::num(p.d1),
               Csv::num(p.d2), Csv::num(p.cost)});
      return kExitOk;
    }
    const auto action = action_from_config(cfg, {{"x", m.x().size}, {"y", m.y().size}}, m.a().size);
    const auto p = eval_cascade_lossless(m, action);
    if (std::isinf(p.cost)) throw InfeasibleError("action channel puts mass on a forbidden action");
    csv.row({hash, "cascade", "lossless", Csv::num(p.r1_min), Csv::num(p.r2_min), Csv::num(p.d1),
             Csv::num(p.d2), Csv::num(p.cost)});
    return kExitOk;
  }

  if (topology == "broadcast-lossless") {
    const BroadcastModel m = build_broadcast_model(cfg);
    const auto action = action_from_config(cfg, {{"x", m.x().size}}, m.a().size);
    const auto p = eval_broadcast_lossless(m, action);
    if (std::isinf(p.cost)) throw InfeasibleError("action channel puts mass on a forbidden action");
    csv.header({"config_hash", "topology", "rb_min", "r1_plus_rb", "r2_plus_rb", "cost"});
    csv.row({hash, "broadcast-lossless", Csv::num(p.rb_min), Csv::num(p.r1_plus_rb_min),
             Csv::num(p.r2_plus_rb_min), Csv::num(p.cost)});
    return kExitOk;
  }

  if (topology == "cr") {
    const BroadcastModel m = build_broadcast_model(cfg);
    const auto t = cr_channel_from_config(cfg, m);
    const auto p = eval_cr_point(m, t);
    if (std::isinf(p.cost)) throw InfeasibleError("action channel puts mass on a forbidden action");
    csv.header({"config_hash", "topology", "rb_min", "r1_plus_rb", "r2_plus_rb", "r_sum", "d1", "d2",
                "cost"});
    csv.row({hash, "cr", Csv::num(p.rb_min), Csv::num(p.r1_plus_rb_min), Csv::num(p.r2_plus_rb_min),
             Csv::num(*p.r_sum_min), Csv::num(*p.d1), Csv::num(*p.d2), Csv::num(p.cost)});
    return kExitOk;
  }

  throw std::invalid_argument("unknown topology '" + topology + "'");
}

namespace {

std::string flatten_table(const std::vector<double>& t) {
  std::string s = "\"";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ' ';
    s += format_g9(t[i]);
  }
  return s + "\"";
}

// lower-left convex hull of the found (r1, r2) points: the boundary
// achievable by time-sharing between found channels
std::vector<std::size_t> lower_envelope(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].first != pts[b].first) return pts[a].first < pts[b].first;
    return pts[a].second < pts[b].second;
  });
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    while (hull.size() >= 2) {
      const auto& o = pts[hull[hull.size() - 2]];
      const auto& a = pts[hull.back()];
      const auto& b = pts[idx];
      const double cross = (a.first - o.first) * (b.second - o.second) -
                           (a.second - o.second) * (b.first - o.first);
      if (cross <= 0)  // keep only the lower boundary
        hull.pop_back();
      else
        break;
    }
    hull.push_back(idx);
  }
  // prune the increasing tail: only keep the Pareto-relevant part
  while (hull.size() >= 2 && pts[hull[hull.size() - 1]].second >= pts[hull[hull.size() - 2]].second)
    hull.pop_back();
  return hull;
}

}  // namespace

int cmd_optimize(const Config& cfg, const CommonOptions& opt, std::ostream& out) {
  Csv csv(out);
  const std::string hash = config_hash(cfg, opt.seed);
  const std::string topology = cfg.get("", "topology");
  const SearchConfig search = search_from_config(cfg, opt.seed);
  const CostBudget gamma = cost_budget_from_config(cfg);
  const DistortionBudget dist = dist_budget_from_config(cfg);

  if (topology == "cascade") {
    const CascadeModel m = build_cascade_model(cfg);
    const auto etas = cfg.has("sweep", "eta") ? parse_double_list(cfg.get("sweep", "eta"))
                                              : std::vector<double>{parse_double(cfg.get_or("", "eta", "1"))};
    csv.header({"config_hash", "kind", "eta", "r1_min", "r2_min", "d1", "d2", "cost", "objective",
                "witness"});
    std::vector<std::pair<double, double>> pts;
    std::vector<std::vector<std::string>> found_rows;
    for (const double eta : etas) {
      const auto r = optimize_cascade(m, gamma, dist, eta, search);
      if (!r.feasible) throw InfeasibleError("no test channel satisfies the budgets");
      const auto& p = r.point;
      found_rows.push_back({hash, "found", Csv::num(eta), Csv::num(p.r1_min), Csv::num(p.r2_min),
                            Csv::num(p.d1), Csv::num(p.d2), Csv::num(p.cost),
                            Csv::num(p.r1_min + eta * p.r2_min), flatten_table(r.channel->ch.mass())});
      pts.emplace_back(p.r1_min, p.r2_min);
    }
    for (const auto& row : found_rows) csv.row(row);
    // found boundary plus its lower convex envelope, labeled separately
    for (const std::size_t idx : lower_envelope(pts)) {
      auto row = found_rows[idx];
      row[1] = "envelope";
      csv.row(row);
    }
    return kExitOk;
  }

  if (topology == "cr") {
    const BroadcastModel m = build_broadcast_model(cfg);
    BroadcastWeights w;
    w.w1 = parse_double(cfg.get_or("", "w1", "1"));
    w.w2 = parse_double(cfg.get_or("", "w2", "1"));
    w.wb = parse_double(cfg.get_or("", "wb", "1"));
    const auto r = optimize_cr(m, gamma, dist, w, search);
    if (!r.feasible) throw InfeasibleError("no test channel satisfies the budgets");
    csv.header({"config_hash", "w1", "w2", "wb", "r1", "r2", "rb", "rb_min", "r1_plus_rb", "r2_plus_rb",
                "r_sum", "d1", "d2", "cost", "objective", "witness"});
    const auto& p = r.point;
    csv.row({hash, Csv::num(w.w1), Csv::num(w.w2), Csv::num(w.wb), Csv::num(r.rates.r1),
             Csv::num(r.rates.r2), Csv::num(r.rates.rb), Csv::num(p.rb_min), Csv::num(p.r1_plus_rb_min),
             Csv::num(p.r2_plus_rb_min), Csv::num(*p.r_sum_min), Csv::num(*p.d1), Csv::num(*p.d2),
             Csv::num(p.cost),
             Csv::num(w.w1 * r.rates.r1 + w.w2 * r.rates.r2 + w.wb * r.rates.rb),
             flatten_table(r.channel->recon.mass())});
    return kExitOk;
  }

  throw std::invalid_argument("optimize supports the cascade and cr topologies");
}

int cmd_fig6(const Fig6Options& opt, const std::string& hash, std::ostream& out) {
  Csv csv(out);
  std::vector<double> etas = opt.etas;
  if (etas.empty())
    for (int i = 0; i <= 50; ++i) etas.push_back(i / 50.0);

  Config builtin_cfg = parse_config_text("builtin = s-channel-example\ntopology = switching\n[sweep]\ndelta = " +
                                         format_g9(opt.delta) + "\n");
  const SwitchingModel m = build_switching_model(builtin_cfg);
  const SweepGrid grid{opt.coarse, opt.fine};

  std::vector<std::string> header = {"config_hash", "eta"};
  for (std::size_t g = 0; g < opt.gammas.size(); ++g) {
    const std::string suffix = "_g" + std::to_string(g + 1);
    header.push_back("gain" + suffix);
    header.push_back("opt_alpha" + suffix);
    header.push_back("opt_beta" + suffix);
    header.push_back("greedy_alpha" + suffix);
  }
  csv.header(header);

  for (const double eta : etas) {
    std::vector<std::string> row = {hash, Csv::num(eta)};
    for (const double gamma : opt.gammas) {
      const auto best = weighted_sumrate(m, eta, opt.rb, gamma, SumrateMode::optimal, grid);
      const auto greedy = weighted_sumrate(m, eta, opt.rb, gamma, SumrateMode::greedy, grid);
      if (!best.feasible || !greedy.feasible)
        throw InfeasibleError("empty feasible action grid at gamma = " + format_g9(gamma));
      row.push_back(Csv::num(greedy.value - best.value));
      row.push_back(Csv::num(best.alpha));
      row.push_back(Csv::num(best.beta));
      row.push_back(Csv::num(greedy.alpha));
    }
    csv.row(row);
  }
  return kExitOk;
}

int cmd_fme_check(const std::string& system, const std::string& target_file, const CommonOptions& opt,
                  std::ostream& report) {
  using namespace casvm::fme;
  InequalitySystem base, target;
  std::vector<std::string> drop;
  if (system == "prop2" || system == "prop3" || system == "prop2-mutated") {
    const Builtin which = builtin_from_name(system);
    base = builtin_system(system == "prop3" ? Builtin::prop3 : Builtin::prop2);
    target = builtin_system(system == "prop2" ? Builtin::prop2_target
                            : system == "prop3" ? Builtin::prop3_target
                                                : Builtin::prop2_target_mutated);
    drop = builtin_split_variables(which);
  } else {
    std::ifstream in(system);
    if (!in) throw std::invalid_argument("cannot open system file: " + system);
    std::ostringstream ss;
    ss << in.rdbuf();
    base = parse_system(ss.str());
    if (target_file.empty())
      throw std::invalid_argument("a custom system file needs a target system file");
    std::ifstream tin(target_file);
    if (!tin) throw std::invalid_argument("cannot open target file: " + target_file);
    std::ostringstream ts;
    ts << tin.rdbuf();
    target = parse_system(ts.str());
    for (const auto& v : base.variables)
      if (std::find(target.variables.begin(), target.variables.end(), v) == target.variables.end())
        drop.push_back(v);
  }

  report << "system: " << base.rows.size() << " inequalities over " << base.variables.size()
         << " variables\n";
  report << "eliminating:";
  for (const auto& v : drop) report << ' ' << v;
  report << "\n";

  const auto projected = fme_eliminate(base, drop);
  report << "projection: " << projected.rows.size() << " inequalities\n";
  const auto reduced = remove_redundant(projected, opt.seed, opt.trials);
  report << "after redundancy removal (" << opt.trials << " samples, possibly-redundant rows dropped): "
         << reduced.system.rows.size() << " inequalities\n";
  for (const auto& line : {to_text(reduced.system)}) report << line;

  const auto eq = verify_region_equivalence(reduced.system, target, opt.seed ^ 0xabcdef, opt.trials);
  if (eq.equivalent) {
    report << "PASS: projection is equivalent to the target region over " << eq.trials
           << " nonnegative parameter samples\n";
    report << "note: parameters are treated as free nonnegative reals, which is stronger than\n"
              "      checking only instantiations realizable by information measures\n";
    return kExitOk;
  }
  report << "FAIL: " << eq.counterexample << "\n";
  return kExitCheckFailed;
}

int cmd_oracle_check(const OracleCheckOptions& opt, std::ostream& report) {
  bool all_ok = true;
  const auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    report << (ok ? "PASS" : "FAIL") << ": " << name;
    if (!detail.empty()) report << " (" << detail << ")";
    report << "\n";
    if (!ok) all_ok = false;
  };

  // information kernel vs the direct-summation oracle
  {
    Rng rng(opt.seed);
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const std::size_t na = 2 + rng.next_below(opt.max_alphabet - 1);
      const std::size_t nb = 2 + rng.next_below(opt.max_alphabet - 1);
      const std::size_t nc = 2 + rng.next_below(2);
      JointDistribution d({{"a", na}, {"b", nb}, {"c", nc}}, rng.next_simplex(na * nb * nc));
      const double kernel = conditional_mutual_information(d, {"a"}, {"b"}, {"c"});
      const double direct = oracle::mi_oracle(d, {"a"}, {"b"}, {"c"});
      worst = std::max(worst, std::abs(kernel - direct));
    }
    check("conditional mutual information agrees with the direct summation", worst <= opt.tol,
          "max deviation " + format_g9(worst));
  }

  // symbol relabeling invariance of the oracle
  {
    Rng rng(opt.seed + 1);
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const std::size_t n = 3;
      const auto mass = rng.next_simplex(n * n);
      JointDistribution d({{"a", n}, {"b", n}}, mass);
      std::vector<double> permuted(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) permuted[((i + 1) % n) * n + (j + 2) % n] = mass[i * n + j];
      JointDistribution dp({{"a", n}, {"b", n}}, permuted);
      worst = std::max(worst, std::abs(oracle::mi_oracle(d, {"a"}, {"b"}, {}) -
                                       oracle::mi_oracle(dp, {"a"}, {"b"}, {})));
    }
    check("oracle is invariant under symbol relabeling", worst <= opt.tol, "max deviation " + format_g9(worst));
  }

  // switching evaluator vs the generic lossless evaluator on the expanded channel
  {
    Rng rng(opt.seed + 2);
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const double delta = rng.next_double();
      Config c = parse_config_text("builtin = bsc-example\ntopology = switching\n[sweep]\ndelta = " +
                                   format_g9(delta) + "\n");
      const SwitchingModel m = build_switching_model(c);
      const double alpha = rng.next_double(), beta = rng.next_double();
      const auto action = switching_action_channel(m, alpha, beta);
      const auto direct = eval_switching(m, action);
      const auto expanded = eval_broadcast_lossless(switching_to_broadcast(m), action);
      worst = std::max({worst, std::abs(direct.rb_min - expanded.rb_min),
                        std::abs(direct.r1_plus_rb_min - expanded.r1_plus_rb_min),
                        std::abs(direct.r2_plus_rb_min - expanded.r2_plus_rb_min)});
    }
    check("switching bounds match the expanded-channel evaluation", worst <= opt.tol,
          "max deviation " + format_g9(worst));
  }

  // lossless cascade consistency: general evaluator at the exact-copy channel
  {
    Rng rng(opt.seed + 3);
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const std::size_t nx = 2 + rng.next_below(2), ny = 2 + rng.next_below(2), na = 2,
                        nz = 2 + rng.next_below(2);
      JointDistribution source({{"x", nx}, {"y", ny}}, rng.next_simplex(nx * ny));
      std::vector<double> vm_mass;
      for (std::size_t i = 0; i < na * ny; ++i) {
        const auto row = rng.next_simplex(nz);
        vm_mass.insert(vm_mass.end(), row.begin(), row.end());
      }
      CascadeModel m{JointDistribution(source),
                     ConditionalChannel({{"a", na}, {"y", ny}}, {{"z", nz}}, vm_mass),
                     CostTable{std::vector<double>(na, 0.0)},
                     DistortionTable::hamming(nx),
                     DistortionTable::hamming(nx)};
      m = validate(std::move(m));

      std::vector<double> action_mass;
      for (std::size_t i = 0; i < nx * ny; ++i) {
        const auto row = rng.next_simplex(na);
        action_mass.insert(action_mass.end(), row.begin(), row.end());
      }
      ConditionalChannel action({{"x", nx}, {"y", ny}}, {{"a", na}}, action_mass);

      // embed: u := x, xh1 := x, f(u,z) := u
      const std::size_t nu = nx;
      std::vector<double> ch_mass(nx * ny * nx * na * nu, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
          for (std::size_t a = 0; a < na; ++a)
            ch_mass[((x * ny + y) * nx * na * nu) + (x * na + a) * nu + x] =
                action.slice(x * ny + y)[a];
      CascadeTestChannel tc{ConditionalChannel({{"x", nx}, {"y", ny}},
                                               {{"xh1", nx}, {"a", na}, {"u", nu}}, ch_mass),
                            {}};
      tc.decode.resize(nu * nz);
      for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t z = 0; z < nz; ++z) tc.decode[u * nz + z] = u;

      const auto general = eval_cascade_point(m, tc);
      const auto lossless = eval_cascade_lossless(m, action);
      worst = std::max({worst, std::abs(general.r1_min - lossless.r1_min),
                        std::abs(general.r2_min - lossless.r2_min), general.d1, general.d2});
    }
    check("general cascade point at the exact-copy channel matches the lossless bounds", worst <= opt.tol,
          "max deviation " + format_g9(worst));
  }

  // common reconstruction with exact copies reduces to the lossless bounds
  {
    Rng rng(opt.seed + 4);
    double worst = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const std::size_t nx = 2, na = 2, ny = 2, nz = 2;
      // degraded by construction: p(y|a,x) p(z|y,a), with p(z|y,a) shared across x
      std::vector<double> vm_mass;
      for (std::size_t a = 0; a < na; ++a) {
        std::vector<std::vector<double>> pz;
        for (std::size_t y = 0; y < ny; ++y) pz.push_back(rng.next_simplex(nz));
        for (std::size_t x = 0; x < nx; ++x) {
          const auto py = rng.next_simplex(ny);
          for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t z = 0; z < nz; ++z) vm_mass.push_back(py[y] * pz[y][z]);
        }
      }
      BroadcastModel m{JointDistribution({{"x", nx}}, rng.next_simplex(nx)),
                       ConditionalChannel({{"a", na}, {"x", nx}}, {{"y", ny}, {"z", nz}}, vm_mass),
                       CostTable{std::vector<double>(na, 0.0)},
                       DistortionTable::hamming(nx),
                       DistortionTable::hamming(nx),
                       true};
      m = validate(std::move(m));

      std::vector<double> action_mass;
      for (std::size_t x = 0; x < nx; ++x) {
        const auto row = rng.next_simplex(na);
        action_mass.insert(action_mass.end(), row.begin(), row.end());
      }
      ConditionalChannel action({{"x", nx}}, {{"a", na}}, action_mass);
      std::vector<double> recon_mass(nx * na * nx * nx, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t a = 0; a < na; ++a) recon_mass[(x * na + a) * nx * nx + x * nx + x] = 1.0;
      CRTestChannel tc{action,
                       ConditionalChannel({{"x", nx}, {"a", na}}, {{"xh1", nx}, {"xh2", nx}}, recon_mass)};

      const auto cr = eval_cr_point(m, tc);
      const auto lossless = eval_broadcast_lossless(m, action);
      worst = std::max({worst, std::abs(cr.rb_min - lossless.rb_min),
                        std::abs(cr.r1_plus_rb_min - lossless.r1_plus_rb_min),
                        std::abs(cr.r2_plus_rb_min - lossless.r2_plus_rb_min), *cr.d1, *cr.d2});
    }
    check("common-reconstruction bounds with exact copies match the lossless bounds", worst <= opt.tol,
          "max deviation " + format_g9(worst));
  }

  // optimizer never beats the exhaustive grid oracle on its own space; the
  // distortion budgets come from an exact-copy probe channel so they bind
  {
    Rng rng(opt.seed + 5);
    JointDistribution source({{"x", 2}, {"y", 2}}, rng.next_simplex(4));
    std::vector<double> vm_mass;
    for (int i = 0; i < 4; ++i) {
      const auto row = rng.next_simplex(2);
      vm_mass.insert(vm_mass.end(), row.begin(), row.end());
    }
    CascadeModel m{std::move(source), ConditionalChannel({{"a", 2}, {"y", 2}}, {{"z", 2}}, vm_mass),
                   CostTable{{0.0, 1.0}}, DistortionTable::hamming(2), DistortionTable::hamming(2)};
    m = validate(std::move(m));

    std::vector<double> probe_mass(2 * 2 * 2 * 2 * 2, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        probe_mass[(x * 2 + y) * 8 + (x * 2 + 0) * 2 + x] = 1.0;  // xh1 = x, a = 0, u = x
    ConditionalChannel probe({{"x", 2}, {"y", 2}}, {{"xh1", 2}, {"a", 2}, {"u", 2}}, probe_mass);
    const auto probe_point = eval_cascade_point(m, CascadeTestChannel{probe, optimal_cascade_decode(m, probe)});
    const CostBudget gamma{probe_point.cost};
    const DistortionBudget dist{probe_point.d1, probe_point.d2};

    oracle::GridSpec grid;
    grid.step = 0.5;
    grid.u_size = 2;
    const auto o = oracle::brute_force_cascade(m, gamma, dist, 1.0, grid);
    SearchConfig s;
    s.seed = opt.seed;
    s.starts = 8;
    s.u_size = 2;
    const auto r = optimize_cascade(m, gamma, dist, 1.0, s);
    const bool ok = o.feasible && r.feasible &&
                    r.point.r1_min + r.point.r2_min <= o.objective + 1e-6;
    check("multi-start optimizer attains the quantized oracle value", ok,
          "optimizer " + format_g9(r.feasible ? r.point.r1_min + r.point.r2_min : -1.0) + " vs oracle " +
              format_g9(o.feasible ? o.objective : -1.0));
  }

  report << (all_ok ? "oracle-check: all checks passed\n" : "oracle-check: FAILURES above\n");
  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace casvm::cli

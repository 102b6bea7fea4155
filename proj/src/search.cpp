#include "casvm/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "casvm/parallel.hpp"
#include "casvm/rng.hpp"

namespace casvm {

namespace {

constexpr double kFeasibleTol = 1e-9;

// ordering used both for accepting moves and for merging starts:
// feasibility first, then objective, then cost, then the table itself
bool outcome_better(const SearchOutcome& a, const SearchOutcome& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible && std::abs(a.violation - b.violation) > 1e-15) return a.violation < b.violation;
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.point < b.point;
}

struct BlockLayout {
  std::size_t offset;  // into the concatenated point
  std::size_t cells;
  std::size_t outcomes;
  const std::vector<bool>* allowed;
};

class Refiner {
 public:
  Refiner(const std::vector<BlockLayout>& layout, const SearchEvalFn& eval, const SearchConfig& cfg)
      : layout_(layout), eval_(eval), cfg_(cfg) {}

  SearchOutcome run(std::vector<double> point) const {
    SearchEval cur = eval_(point);

    // the best feasible evaluation seen anywhere along the walk; the warm
    // phase may wander off the feasible set and not find its way back
    SearchOutcome best;
    const auto consider = [&](const std::vector<double>& p, const SearchEval& e) {
      if (e.violation > kFeasibleTol) return;
      if (!best.feasible || e.objective < best.objective - 1e-15 ||
          (std::abs(e.objective - best.objective) <= 1e-15 && e.cost < best.cost)) {
        best.feasible = true;
        best.objective = e.objective;
        best.violation = e.violation;
        best.cost = e.cost;
        best.point = p;
      }
    };
    consider(point, cur);

    double mu = 64.0;
    bool warm = cfg_.warm_sweeps > 0;
    std::vector<double> candidate;
    for (int sweep = 0; sweep < cfg_.sweeps; ++sweep) {
      if (sweep >= cfg_.warm_sweeps) warm = false;
      const double penalty = warm ? mu : 1e12;
      bool improved = false;
      for (const auto& b : layout_) {
        for (std::size_t c = 0; c < b.cells; ++c) {
          const std::size_t base = b.offset + c * b.outcomes;
          for (std::size_t i = 0; i < b.outcomes; ++i) {
            const double pi = point[base + i];
            if (pi <= 0.0) continue;
            double best_score = score(cur, penalty);
            std::size_t best_j = i;
            double best_t = 0.0;
            SearchEval best_eval = cur;
            for (std::size_t j = 0; j < b.outcomes; ++j) {
              if (j == i || (b.allowed && !b.allowed->empty() && !(*b.allowed)[j])) continue;
              for (double frac : {1.0, 0.5, 0.25}) {
                const double t = pi * frac;
                candidate = point;
                candidate[base + i] = pi - t;
                if (frac == 1.0) candidate[base + i] = 0.0;  // land exactly on the face
                candidate[base + j] += t;
                const SearchEval e = eval_(candidate);
                consider(candidate, e);
                const double s = score(e, penalty);
                if (s < best_score - cfg_.tol) {
                  best_score = s;
                  best_j = j;
                  best_t = t;
                  best_eval = e;
                }
              }
            }
            if (best_j != i) {
              if (best_t == pi)
                point[base + i] = 0.0;
              else
                point[base + i] = pi - best_t;
              point[base + best_j] += best_t;
              cur = best_eval;
              improved = true;
            }
          }
        }
      }
      mu *= 4.0;
      // once feasible, a sweep with no improvement cannot improve at any
      // higher penalty either
      if (!improved && (!warm || cur.violation <= kFeasibleTol)) break;
    }
    if (best.feasible) return best;
    SearchOutcome out;
    out.feasible = false;
    out.objective = cur.objective;
    out.violation = cur.violation;
    out.cost = cur.cost;
    out.point = std::move(point);
    return out;
  }

 private:
  static double score(const SearchEval& e, double penalty) { return e.objective + penalty * e.violation; }

  const std::vector<BlockLayout>& layout_;
  const SearchEvalFn& eval_;
  const SearchConfig& cfg_;
};

std::vector<double> random_point(const std::vector<BlockLayout>& layout, std::size_t total, Rng& rng) {
  std::vector<double> point(total, 0.0);
  for (const auto& b : layout) {
    std::vector<std::size_t> open;
    for (std::size_t o = 0; o < b.outcomes; ++o)
      if (!b.allowed || b.allowed->empty() || (*b.allowed)[o]) open.push_back(o);
    for (std::size_t c = 0; c < b.cells; ++c) {
      const auto p = rng.next_simplex(open.size());
      for (std::size_t k = 0; k < open.size(); ++k) point[b.offset + c * b.outcomes + open[k]] = p[k];
    }
  }
  return point;
}

}  // namespace

std::size_t SimplexBlock::allowed_count() const {
  if (allowed.empty()) return outcomes;
  return static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true));
}

SearchOutcome simplex_product_search(const std::vector<SimplexBlock>& blocks, const SearchEvalFn& eval,
                                     const SearchConfig& cfg,
                                     const std::vector<std::vector<double>>& extra_seeds) {
  if (blocks.empty()) throw std::invalid_argument("search needs at least one block");
  std::vector<BlockLayout> layout;
  std::size_t total = 0;
  for (const auto& b : blocks) {
    if (b.cells == 0 || b.outcomes == 0) throw std::invalid_argument("empty simplex block");
    if (b.allowed_count() == 0) throw std::invalid_argument("block with every outcome forbidden");
    layout.push_back({total, b.cells, b.outcomes, &b.allowed});
    total += b.size();
  }
  Refiner refiner(layout, eval, cfg);

  // Deterministic seeds: every product of point-mass cells, when small enough
  // to enumerate.  The best few get refined like random starts; region
  // boundaries are often achieved at or near such vertices.
  std::vector<std::vector<double>> seeds;
  for (const auto& s : extra_seeds) {
    if (s.size() != total) throw std::invalid_argument("seed point has the wrong size");
    seeds.push_back(s);
  }
  if (cfg.vertex_seeds) {
    double count = 1.0;
    for (const auto& b : blocks) count *= std::pow(static_cast<double>(b.allowed_count()), static_cast<double>(b.cells));
    if (count <= static_cast<double>(cfg.vertex_cap)) {
      const auto n = static_cast<std::uint64_t>(count);
      std::vector<SearchOutcome> ranked;
      ranked.reserve(n);
      for (std::uint64_t v = 0; v < n; ++v) {
        std::vector<double> point(total, 0.0);
        std::uint64_t rest = v;
        for (const auto& b : layout) {
          std::vector<std::size_t> open;
          for (std::size_t o = 0; o < b.outcomes; ++o)
            if (!b.allowed || b.allowed->empty() || (*b.allowed)[o]) open.push_back(o);
          for (std::size_t c = 0; c < b.cells; ++c) {
            point[b.offset + c * b.outcomes + open[rest % open.size()]] = 1.0;
            rest /= open.size();
          }
        }
        const SearchEval e = eval(point);
        SearchOutcome o;
        o.feasible = e.violation <= kFeasibleTol;
        o.objective = e.objective;
        o.violation = e.violation;
        o.cost = e.cost;
        o.point = std::move(point);
        ranked.push_back(std::move(o));
      }
      std::stable_sort(ranked.begin(), ranked.end(), outcome_better);
      const std::size_t keep = std::min<std::size_t>(cfg.vertex_keep, ranked.size());
      for (std::size_t k = 0; k < keep; ++k) seeds.push_back(std::move(ranked[k].point));
    }
  }

  const std::size_t n_random = cfg.starts > 0 ? static_cast<std::size_t>(cfg.starts) : 0;
  const std::size_t n_runs = seeds.size() + n_random;
  if (n_runs == 0) throw std::invalid_argument("search configured with no starts");

  std::vector<SearchOutcome> outcomes(n_runs);
  parallel_for(n_runs, [&](std::size_t run) {
    if (run < seeds.size()) {
      outcomes[run] = refiner.run(seeds[run]);
    } else {
      Rng rng = rng_for(cfg.seed, run - seeds.size());
      outcomes[run] = refiner.run(random_point(layout, total, rng));
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < n_runs; ++i)
    if (outcome_better(outcomes[i], outcomes[best])) best = i;
  return outcomes[best];
}

}  // namespace casvm

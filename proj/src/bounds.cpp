#include "refcon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "refcon/error.hpp"
#include "refcon/kernels.hpp"
#include "refcon/parallel.hpp"

namespace refcon {
namespace {

MinusResult minimise(const FeasibleRegion& region, std::span<const double> at) {
  const LpResult r = region.optimise(at, Sense::Min);
  if (r.status != LpStatus::Optimal) {
    throw NumericalError(std::string("expenditure lower-bound LP returned ") +
                         to_string(r.status));
  }
  return {r.value, r.x};
}

}  // namespace

FeasibleRegion revealed_worse_region(const PooledDataset& data,
                                     std::span<const std::size_t> worse) {
  Matrix a(worse.size(), data.goods());
  std::vector<double> b(worse.size());
  for (std::size_t r = 0; r < worse.size(); ++r) {
    const auto& p = data[worse[r]].prices;
    std::copy(p.begin(), p.end(), a.row(r).begin());
    b[r] = data.expenditure(worse[r]);
  }
  return FeasibleRegion(data.goods(), std::move(a), std::move(b));
}

MinusResult m_minus(const PooledDataset& data, const ReachabilityRelation& rel,
                    std::size_t base, std::span<const double> at) {
  if (at.size() != data.goods()) throw StructuralError("price vector length differs from K");
  const auto sets = vrp_vrw(rel, base);
  return minimise(revealed_worse_region(data, sets.vrw), at);
}

PlusResult m_plus(const PooledDataset& data, const ReachabilityRelation& rel,
                  std::size_t base, std::span<const double> at) {
  if (at.size() != data.goods()) throw StructuralError("price vector length differs from K");
  PlusResult best{std::numeric_limits<double>::infinity(), base};
  for (std::size_t u : vrp_vrw(rel, base).vrp) {
    const double v = kernels::dot(at, data[u].quantities);
    if (v < best.value) best = {v, u};
  }
  return best;
}

ExpenditureBounds expenditure_bounds(const PooledDataset& data, const ReachabilityRelation& rel,
                                     std::size_t base, std::size_t at) {
  const auto& p = data[at].prices;
  return {base, at, m_minus(data, rel, base, p).value, m_plus(data, rel, base, p).value};
}

const char* to_string(BoundStyle s) {
  return s == BoundStyle::Laspeyres ? "laspeyres" : "paasche";
}

BoundMatrix bound_matrix(const PooledDataset& data, BoundStyle kind) {
  const RPGraph g = build_graph(data);
  if (!check_cewec(g).satisfied) {
    throw InconsistentDataError(
        "data violate the cycle condition; restrict them to a reference set first");
  }
  const ReachabilityRelation rel = reachability(g);
  const std::size_t n = data.size();

  // mm(b, a) = M-(p_a, u_b), mp(b, a) = M+(p_a, u_b)
  Matrix mm(n, n), mp(n, n);
  parallel_for(n, [&](std::size_t b) {
    const auto sets = vrp_vrw(rel, b);
    const FeasibleRegion region = revealed_worse_region(data, sets.vrw);
    for (std::size_t a = 0; a < n; ++a) {
      mm(b, a) = minimise(region, data[a].prices).value;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t u : sets.vrp) best = std::min(best, g.cross(a, u));
      mp(b, a) = best;
    }
  });

  BoundMatrix bm;
  bm.kind = kind;
  bm.ids = g.ids;
  bm.lower = Matrix(n, n);
  bm.upper = Matrix(n, n);
  bm.classical_lower = Matrix(n, n);
  bm.classical_upper = Matrix(n, n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double rmin = 0.0, rmax = 0.0;
      k.ratio_min_max(data[i].prices.data(), data[j].prices.data(), data.goods(), &rmin, &rmax);
      if (i == j) {
        bm.lower(i, j) = bm.upper(i, j) = 1.0;
        bm.classical_lower(i, j) = bm.classical_upper(i, j) = 1.0;
        continue;
      }
      if (kind == BoundStyle::Laspeyres) {
        bm.lower(i, j) = mm(j, i) / mm(j, j);
        bm.upper(i, j) = mp(j, i) / mp(j, j);
        bm.classical_lower(i, j) = rmin;
        bm.classical_upper(i, j) = g.cross(i, j) / g.cross(j, j);
      } else {
        bm.lower(i, j) = mp(i, i) / mp(i, j);
        bm.upper(i, j) = mm(i, i) / mm(i, j);
        bm.classical_lower(i, j) = g.cross(i, i) / g.cross(j, i);
        bm.classical_upper(i, j) = rmax;
      }
    }
  }
  return bm;
}

double proportional_improvement(double classical_width, double multilateral_width) {
  return 1.0 - multilateral_width / classical_width;
}

ImprovementStats bound_improvement_stats(const BoundMatrix& bm) {
  const std::size_t n = bm.size();
  ImprovementStats s;
  s.country_mean.assign(n, 0.0);
  std::vector<std::size_t> per_row(n, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double cw = bm.classical_upper(i, j) - bm.classical_lower(i, j);
      if (!(cw > 1e-12 * std::max(1.0, bm.classical_upper(i, j)))) {
        ++s.skipped;
        continue;
      }
      PairImprovement p;
      p.i = i;
      p.j = j;
      p.classical_width = cw;
      p.multilateral_width = bm.upper(i, j) - bm.lower(i, j);
      p.improvement = proportional_improvement(cw, p.multilateral_width);
      p.lower_gain = bm.lower(i, j) / bm.classical_lower(i, j) - 1.0;
      p.upper_gain = 1.0 - bm.upper(i, j) / bm.classical_upper(i, j);
      s.country_mean[i] += p.improvement;
      ++per_row[i];
      total += p.improvement;
      s.pairs.push_back(p);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (per_row[i] > 0) s.country_mean[i] /= static_cast<double>(per_row[i]);
  }
  if (!s.pairs.empty()) s.mean = total / static_cast<double>(s.pairs.size());
  return s;
}

}  // namespace refcon

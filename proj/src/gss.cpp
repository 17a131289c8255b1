#include "refcon/gss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "refcon/error.hpp"
#include "refcon/kernels.hpp"
#include "refcon/parallel.hpp"
#include "refcon/rpgraph.hpp"

namespace refcon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> outsider_vrw(const PooledDataset& hub, const CountryObservation& k) {
  if (k.prices.size() != hub.goods()) {
    throw StructuralError("outsider '" + k.id + "' has a different number of goods");
  }
  const RPGraph g = build_graph(hub);
  const ReachabilityRelation rel = reachability(g);
  const double m = k.expenditure();
  std::vector<bool> hit(hub.size(), false);
  for (std::size_t u = 0; u < hub.size(); ++u) {
    if (kernels::dot(k.prices, hub[u].quantities) > m * (1.0 + kTauEq)) continue;
    for (std::size_t v = 0; v < hub.size(); ++v) {
      if (rel.reach.test(u, v)) hit[v] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < hub.size(); ++v) {
    if (hit[v]) out.push_back(v);
  }
  return out;
}

FeasibleRegion outsider_region(const PooledDataset& hub, std::span<const std::size_t> vrw,
                               const CountryObservation& k, bool budget_equality) {
  const std::size_t K = hub.goods();
  const std::size_t rows = vrw.size() + (budget_equality ? 0 : 1);
  Matrix ge(rows, K);
  std::vector<double> b(rows);
  for (std::size_t r = 0; r < vrw.size(); ++r) {
    std::copy(hub[vrw[r]].prices.begin(), hub[vrw[r]].prices.end(), ge.row(r).begin());
    b[r] = hub.expenditure(vrw[r]);
  }
  if (!budget_equality) {
    std::copy(k.prices.begin(), k.prices.end(), ge.row(rows - 1).begin());
    b[rows - 1] = k.expenditure();
    return FeasibleRegion(K, std::move(ge), std::move(b));
  }
  Matrix eq(1, K);
  std::copy(k.prices.begin(), k.prices.end(), eq.row(0).begin());
  return FeasibleRegion(K, std::move(ge), std::move(b), std::move(eq), {k.expenditure()});
}

MinusResult require_optimal(const LpResult& r, const char* what) {
  if (r.status != LpStatus::Optimal) {
    throw NumericalError(std::string(what) + " LP returned " + to_string(r.status));
  }
  return {r.value, r.x};
}

}  // namespace

IndexMatrix gss_hub(const BoundMatrix& bm) {
  IndexMatrix m;
  m.method = IndexMethod::Gss;
  m.ids = bm.ids;
  m.values = Matrix(bm.size(), bm.size());
  for (std::size_t i = 0; i < bm.size(); ++i) {
    for (std::size_t j = 0; j < bm.size(); ++j) {
      const double lo = bm.lower(i, j), hi = bm.upper(i, j);
      if (!(lo > 0.0) || !(hi > 0.0)) throw NumericalError("non-positive bound in hub matrix");
      m.values(i, j) = i == j ? 1.0 : std::sqrt(lo * hi);
    }
  }
  return m;
}

OutsiderExtension::OutsiderExtension(const PooledDataset& hub, CountryObservation outsider)
    : outsider_(std::move(outsider)),
      m_(outsider_.expenditure()),
      vrw_(outsider_vrw(hub, outsider_)),
      lower_region_(outsider_region(hub, vrw_, outsider_, false)),
      upper_region_(outsider_region(hub, vrw_, outsider_, true)) {
  if (!lower_region_.feasible()) throw NumericalError("outsider lower-bound region is empty");
}

MinusResult OutsiderExtension::lower(std::span<const double> at) const {
  return require_optimal(lower_region_.optimise(at, Sense::Min), "outsider lower-bound");
}

std::optional<MinusResult> OutsiderExtension::upper(std::span<const double> at) const {
  if (!extendable()) return std::nullopt;
  return require_optimal(upper_region_.optimise(at, Sense::Max), "outsider upper-bound");
}

const char* to_string(ExtensionStatus s) {
  switch (s) {
    case ExtensionStatus::Hub: return "hub";
    case ExtensionStatus::Extended: return "extended";
    case ExtensionStatus::NoExtension: return "no_extension";
  }
  return "?";
}

namespace {

OutsideResult evaluate(const OutsiderExtension& ext, std::span<const double> at) {
  OutsideResult r;
  r.vrw = ext.revealed_worse();
  r.lower = ext.lower(at).value / ext.expenditure();
  if (const auto up = ext.upper(at)) {
    r.status = ExtensionStatus::Extended;
    r.upper = up->value / ext.expenditure();
    r.value = std::sqrt(r.lower * r.upper);
    r.forecast = up->bundle;
  } else {
    r.status = ExtensionStatus::NoExtension;
    r.upper = kInf;
    r.value = kNaN;
  }
  return r;
}

}  // namespace

OutsideResult gss_outside(const PooledDataset& hub, const CountryObservation& outsider,
                          std::size_t target) {
  const OutsiderExtension ext(hub, outsider);
  return evaluate(ext, hub[target].prices);
}

GSSResult gss_full(const PooledDataset& data, const GssOptions& options) {
  const std::size_t n = data.size();
  const RPGraph g = build_graph(data);

  GSSResult res;
  res.hub = max_reference_set(g, options.exact_subset);
  res.in_hub.assign(n, false);
  for (std::size_t h : res.hub) res.in_hub[h] = true;
  res.base = data.base();
  res.anchor = res.base;
  if (!res.in_hub[res.base]) {
    res.anchor = res.hub.front();
    for (std::size_t h : res.hub) {
      if (data.expenditure(h) > data.expenditure(res.anchor)) res.anchor = h;
    }
  }

  BoundMatrix& bm = res.bounds;
  bm.kind = BoundStyle::Laspeyres;
  bm.ids = g.ids;
  bm.lower = Matrix(n, n, kNaN);
  bm.upper = Matrix(n, n, kNaN);
  bm.classical_lower = Matrix(n, n);
  bm.classical_upper = Matrix(n, n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double rmin = 0.0, rmax = 0.0;
      k.ratio_min_max(data[i].prices.data(), data[j].prices.data(), data.goods(), &rmin, &rmax);
      bm.classical_lower(i, j) = i == j ? 1.0 : rmin;
      bm.classical_upper(i, j) = i == j ? 1.0 : g.cross(i, j) / g.cross(j, j);
    }
  }

  // Hub columns: indifference base inside the reference set.
  const PooledDataset hub_data = data.subset(res.hub);
  const ReachabilityRelation hub_rel = reachability(build_graph(hub_data));
  parallel_for(res.hub.size(), [&](std::size_t h) {
    const std::size_t j = res.hub[h];
    const auto sets = vrp_vrw(hub_rel, h);
    const FeasibleRegion region = revealed_worse_region(hub_data, sets.vrw);
    std::vector<double> mm(n), mp(n);
    for (std::size_t i = 0; i < n; ++i) {
      mm[i] = require_optimal(region.optimise(data[i].prices, Sense::Min), "hub lower-bound").value;
      mp[i] = kInf;
      for (std::size_t u : sets.vrp) mp[i] = std::min(mp[i], g.cross(i, res.hub[u]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      bm.lower(i, j) = i == j ? 1.0 : mm[i] / mm[j];
      bm.upper(i, j) = i == j ? 1.0 : mp[i] / mp[j];
    }
  });

  // Outsider columns, sequentially, largest economies first.
  std::vector<std::size_t> outsiders;
  for (std::size_t i = 0; i < n; ++i) {
    if (!res.in_hub[i]) outsiders.push_back(i);
  }
  std::sort(outsiders.begin(), outsiders.end(), [&](std::size_t a, std::size_t b) {
    if (data.expenditure(a) != data.expenditure(b)) return data.expenditure(a) > data.expenditure(b);
    return data[a].id < data[b].id;
  });

  PooledDataset pool = hub_data;
  std::vector<std::size_t> origin = res.hub;  // dataset index behind each pool row
  for (std::size_t kx : outsiders) {
    const OutsiderExtension ext(pool, data[kx]);
    OutsiderRecord rec;
    rec.country = kx;
    rec.result = evaluate(ext, data[res.anchor].prices);
    for (auto& v : rec.result.vrw) v = origin[v];
    std::sort(rec.result.vrw.begin(), rec.result.vrw.end());
    rec.result.vrw.erase(std::unique(rec.result.vrw.begin(), rec.result.vrw.end()),
                         rec.result.vrw.end());

    std::vector<double> lo(n), hi(n);
    parallel_for(n, [&](std::size_t i) {
      lo[i] = ext.lower(data[i].prices).value / ext.expenditure();
      const auto up = ext.upper(data[i].prices);
      hi[i] = up ? up->value / ext.expenditure() : kInf;
    });
    for (std::size_t i = 0; i < n; ++i) {
      bm.lower(i, kx) = i == kx ? 1.0 : lo[i];
      bm.upper(i, kx) = i == kx ? 1.0 : hi[i];
    }

    if (rec.result.status == ExtensionStatus::Extended) {
      CountryObservation pseudo{data[kx].id + "*", data[kx].prices, rec.result.forecast,
                                std::nullopt, std::nullopt};
      PooledDataset candidate = pool.with_observation(std::move(pseudo));
      if (check_cewec(build_graph(candidate)).satisfied) {
        pool = std::move(candidate);
        origin.push_back(kx);
        rec.accumulated = true;
      }
    }
    res.outside.push_back(std::move(rec));
  }

  res.pairwise = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = bm.lower(i, j), hi = bm.upper(i, j);
      res.pairwise(i, j) = i == j ? 1.0 : (std::isfinite(hi) ? std::sqrt(lo * hi) : kNaN);
    }
  }

  // Published table against the anchor, then rebased so the base country is 1.
  const std::size_t a = res.anchor;
  std::vector<double> t(n), tl(n), tu(n);
  std::vector<ExtensionStatus> status(n, ExtensionStatus::Hub);
  for (const auto& rec : res.outside) status[rec.country] = rec.result.status;
  for (std::size_t i = 0; i < n; ++i) {
    if (status[i] == ExtensionStatus::Extended) {
      t[i] = 1.0 / res.pairwise(a, i);
      tl[i] = 1.0 / bm.upper(a, i);
      tu[i] = 1.0 / bm.lower(a, i);
    } else {
      t[i] = res.pairwise(i, a);
      tl[i] = bm.lower(i, a);
      tu[i] = bm.upper(i, a);
    }
  }
  const double tb = t[res.base];
  res.index.method = IndexMethod::Gss;
  res.index.ids = g.ids;
  res.index.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    res.table.push_back({data[i].id, t[i] / tb, tl[i] / tb, tu[i] / tb, res.in_hub[i], status[i]});
    for (std::size_t j = 0; j < n; ++j) res.index.values(i, j) = i == j ? 1.0 : t[i] / t[j];
  }
  return res;
}

HomotheticResult gss_homothetic(const PooledDataset& data, std::span<const std::size_t> hub) {
  if (hub.empty()) throw EmptyDatasetError("empty homothetic hub");
  const PooledDataset sub = data.subset(hub);
  const RPGraph g = build_graph(sub);
  if (!check_harp(g).satisfied) {
    throw InconsistentDataError(
        "hub violates the homothetic condition; choose a set with greedy_homothetic_refset");
  }
  const std::size_t n = sub.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d(i, j) = i == j ? 0.0 : std::log(g.cross(i, j) / g.cross(j, j));
    }
  }
  const auto& k = kernels::active();
  for (std::size_t via = 0; via < n; ++via) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != via) k.min_plus_row(d(i, via), d.row(via).data(), d.row(i).data(), n);
    }
  }

  HomotheticResult r;
  r.hub.assign(hub.begin(), hub.end());
  r.upper = Matrix(n, n);
  r.lower = Matrix(n, n);
  r.pairwise = Matrix(n, n);
  std::vector<double> potential(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.upper(i, j) = std::exp(d(i, j));
      r.lower(i, j) = std::exp(-d(j, i));
      r.pairwise(i, j) = std::exp(0.5 * (d(i, j) - d(j, i)));
      potential[i] += 0.5 * (d(i, j) - d(j, i));
    }
    potential[i] /= static_cast<double>(n);
  }
  r.index.method = IndexMethod::Homothetic;
  r.index.ids = g.ids;
  r.index.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.index.values(i, j) = i == j ? 1.0 : std::exp(potential[i] - potential[j]);
    }
  }
  return r;
}

}  // namespace refcon

#include "refcon/aggregates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "refcon/error.hpp"

namespace refcon {
namespace {

void validate(std::span<const double> x, std::span<const double> w) {
  if (x.size() != w.size()) throw StructuralError("values and populations differ in length");
  if (x.empty()) throw EmptyDatasetError("no countries");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) throw DomainError("negative or non-finite value");
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw DomainError("non-positive population");
    total += x[i] * w[i];
  }
  if (!(total > 0.0)) throw DomainError("all values are zero");
}

}  // namespace

WorldOutput world_output(const PooledDataset& data, const IndexMatrix& index, std::size_t base) {
  if (index.size() != data.size()) throw StructuralError("index and dataset differ in size");
  std::string missing;
  for (const auto& o : data.observations()) {
    if (!o.population) missing += (missing.empty() ? "" : ", ") + o.id;
  }
  if (!missing.empty()) throw ConfigurationError("population missing for: " + missing);

  WorldOutput out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double ppp = index.values(i, base);
    if (!(ppp > 0.0) || !std::isfinite(ppp)) {
      throw NumericalError("no usable PPP for '" + data[i].id + "'");
    }
    out.ids.push_back(data[i].id);
    out.population.push_back(*data[i].population);
    out.per_capita.push_back(data.expenditure(i) / ppp);
    out.real_expenditure.push_back(out.population.back() * out.per_capita.back());
    out.total += out.real_expenditure.back();
  }
  return out;
}

LorenzCurve lorenz(std::span<const double> x, std::span<const double> w,
                   std::span<const std::string> ids) {
  validate(x, w);
  if (!ids.empty() && ids.size() != x.size()) throw StructuralError("ids differ in length");
  LorenzCurve c;
  c.order.resize(x.size());
  std::iota(c.order.begin(), c.order.end(), 0);
  std::stable_sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return ids.empty() ? a < b : ids[a] < ids[b];
  });
  double pop = 0.0, val = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pop += w[i];
    val += w[i] * x[i];
  }
  c.points.emplace_back(0.0, 0.0);
  double cp = 0.0, cv = 0.0;
  for (std::size_t i : c.order) {
    cp += w[i];
    cv += w[i] * x[i];
    c.points.emplace_back(cp / pop, cv / val);
  }
  c.points.back() = {1.0, 1.0};
  return c;
}

double gini_from_curve(const LorenzCurve& curve) {
  double area2 = 0.0;  // twice the area under the curve
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto [x0, y0] = curve.points[k - 1];
    const auto [x1, y1] = curve.points[k];
    area2 += (x1 - x0) * (y1 + y0);
  }
  return 1.0 - area2;
}

double gini(std::span<const double> per_capita, std::span<const double> populations) {
  return gini_from_curve(lorenz(per_capita, populations));
}

double gini_pairwise(std::span<const double> x, std::span<const double> w) {
  validate(x, w);
  double wsum = 0.0, wx = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    wsum += w[i];
    wx += w[i] * x[i];
    for (std::size_t j = 0; j < x.size(); ++j) diff += w[i] * w[j] * std::abs(x[i] - x[j]);
  }
  const double mean = wx / wsum;
  return diff / (2.0 * wsum * wsum * mean);
}

}  // namespace refcon

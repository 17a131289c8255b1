#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refcon/dataset.hpp"
#include "refcon/indices.hpp"

namespace refcon {

struct WorldOutput {
  std::vector<std::string> ids;
  std::vector<double> real_expenditure;  // population * m_i / PPP_i vs base
  std::vector<double> per_capita;        // m_i / PPP_i
  std::vector<double> population;
  double total = 0.0;
};

// Throws ConfigurationError naming countries without a population.
WorldOutput world_output(const PooledDataset& data, const IndexMatrix& index, std::size_t base);

struct LorenzCurve {
  // (cumulative population share, cumulative value share), from (0,0) to (1,1).
  std::vector<std::pair<double, double>> points;
  std::vector<std::size_t> order;  // input positions, poorest first
};

// Sorted ascending by per-capita value; ties by `ids` when given, otherwise
// by position. Throws DomainError for negative values, non-positive
// populations or an all-zero total.
LorenzCurve lorenz(std::span<const double> per_capita, std::span<const double> populations,
                   std::span<const std::string> ids = {});

// Population-weighted Gini from the trapezoid area under the Lorenz curve.
double gini(std::span<const double> per_capita, std::span<const double> populations);

double gini_from_curve(const LorenzCurve& curve);

// sum_i sum_j w_i w_j |x_i - x_j| / (2 W^2 mean), the mean-difference form.
double gini_pairwise(std::span<const double> per_capita, std::span<const double> populations);

}  // namespace refcon

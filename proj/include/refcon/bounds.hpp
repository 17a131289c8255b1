#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "refcon/dataset.hpp"
#include "refcon/lp.hpp"
#include "refcon/matrix.hpp"
#include "refcon/rpgraph.hpp"

namespace refcon {

struct MinusResult {
  double value = 0.0;
  std::vector<double> bundle;  // cheapest bundle at the evaluation prices
};

struct PlusResult {
  double value = 0.0;
  std::size_t country = 0;  // member of VRP(base) attaining the minimum
};

// {q >= 0 : p_u · q >= m_u for every u in `worse`}.
FeasibleRegion revealed_worse_region(const PooledDataset& data,
                                     std::span<const std::size_t> worse);

// Lower bound on the expenditure needed at prices `at` to reach the utility
// of country `base`. Throws NumericalError if the LP does not solve.
MinusResult m_minus(const PooledDataset& data, const ReachabilityRelation& rel,
                    std::size_t base, std::span<const double> at);

// Upper bound: cheapest observed bundle, at prices `at`, among countries
// revealed preferred to `base`.
PlusResult m_plus(const PooledDataset& data, const ReachabilityRelation& rel,
                  std::size_t base, std::span<const double> at);

struct ExpenditureBounds {
  std::size_t base_vertex = 0;
  std::size_t at_prices = 0;
  double m_minus = 0.0;
  double m_plus = 0.0;
};

ExpenditureBounds expenditure_bounds(const PooledDataset& data, const ReachabilityRelation& rel,
                                     std::size_t base, std::size_t at);

enum class BoundStyle { Laspeyres, Paasche };

const char* to_string(BoundStyle s);

// Bounds on the cost-of-living ratio P_i / P_j for every ordered pair.
// Laspeyres style holds utility at u(q_j); Paasche style at u(q_i).
struct BoundMatrix {
  BoundStyle kind = BoundStyle::Laspeyres;
  std::vector<std::string> ids;
  Matrix lower;
  Matrix upper;
  Matrix classical_lower;
  Matrix classical_upper;

  std::size_t size() const { return ids.size(); }
  std::size_t indifference_base(std::size_t i, std::size_t j) const {
    return kind == BoundStyle::Laspeyres ? j : i;
  }
};

// Throws InconsistentDataError when the data violate CEWEC; reduce them
// with max_reference_set first.
BoundMatrix bound_matrix(const PooledDataset& data, BoundStyle kind);

struct PairImprovement {
  std::size_t i = 0;
  std::size_t j = 0;
  double classical_width = 0.0;
  double multilateral_width = 0.0;
  double improvement = 0.0;  // 1 - multilateral / classical width
  double lower_gain = 0.0;   // lower / classical_lower - 1
  double upper_gain = 0.0;   // 1 - upper / classical_upper
};

struct ImprovementStats {
  std::vector<PairImprovement> pairs;
  std::vector<double> country_mean;  // mean improvement over pairs in row i
  double mean = 0.0;
  std::size_t skipped = 0;  // pairs with zero classical width
};

ImprovementStats bound_improvement_stats(const BoundMatrix& bm);

double proportional_improvement(double classical_width, double multilateral_width);

}  // namespace refcon

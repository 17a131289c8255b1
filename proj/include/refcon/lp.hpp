#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "refcon/matrix.hpp"

namespace refcon {

// Absolute tolerance on constraint residuals, applied after each row is
// scaled to unit largest coefficient.
inline constexpr double kTauLp = 1e-9;

enum class Sense { Min, Max };
enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

// objective · q subject to ge · q >= ge_rhs, eq · q = eq_rhs, q >= 0.
struct LinearProgram {
  std::vector<double> objective;
  Matrix ge;
  std::vector<double> ge_rhs;
  Matrix eq;
  std::vector<double> eq_rhs;
  Sense sense = Sense::Min;

  std::size_t variables() const { return objective.size(); }
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> ge_duals;
  std::vector<double> eq_duals;
  double dual_value = 0.0;
  double duality_gap = 0.0;
  double max_residual = 0.0;  // worst scaled constraint violation
  std::size_t pivots = 0;
};

// Dense two-phase simplex with Bland's rule. Deterministic for a given input.
LpResult solve(const LinearProgram& lp);

// Plain-text "min c·x s.t." rendering for debugging.
std::string dump(const LinearProgram& lp);

// A constraint set solved through phase 1 once. optimise() restarts phase 2
// from a copy of the feasible tableau, so repeated objectives over the same
// region cost one phase-2 run each and give the same answer as solve().
// Const methods are safe to call concurrently.
class FeasibleRegion {
 public:
  FeasibleRegion(std::size_t variables, Matrix ge, std::vector<double> ge_rhs,
                 Matrix eq = {}, std::vector<double> eq_rhs = {});

  bool feasible() const { return feasible_; }
  std::size_t variables() const { return n_; }
  LpResult optimise(std::span<const double> objective, Sense sense) const;

 private:
  std::size_t n_ = 0;
  std::size_t m_ge_ = 0;
  std::size_t m_eq_ = 0;
  Matrix ge_, eq_;
  std::vector<double> ge_rhs_, eq_rhs_;
  std::vector<double> row_factor_;  // sign and scale applied to each row
  Matrix tableau_;                  // rows x (columns + 1), rhs last
  std::vector<std::size_t> basis_;
  bool feasible_ = false;
  std::size_t phase1_pivots_ = 0;
};

}  // namespace refcon

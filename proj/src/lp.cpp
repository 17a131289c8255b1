#include "refcon/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "refcon/error.hpp"
#include "refcon/kernels.hpp"

namespace refcon {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr std::size_t kMaxPivots = 200000;

// Tableau layout: structural columns [0, n), surplus columns for the >= rows
// [n, n + m_ge), one artificial per row [n + m_ge, n + m_ge + m), rhs last.
struct Simplex {
  Matrix& t;
  std::vector<std::size_t>& basis;
  std::vector<double> d;  // reduced costs, rhs slot holds -objective
  std::size_t cols;       // excluding rhs
  std::size_t allowed;    // columns eligible to enter
  std::size_t pivots = 0;

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t w = cols + 1;
    auto pr = t.row(r);
    const double inv = 1.0 / pr[c];
    for (double& v : pr) v *= inv;
    pr[c] = 1.0;
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) {
        k.axpy(-f, pr.data(), t.row(i).data(), w);
        t(i, c) = 0.0;
      }
    }
    const double f = d[c];
    if (f != 0.0) {
      k.axpy(-f, pr.data(), d.data(), w);
      d[c] = 0.0;
    }
    basis[r] = c;
    if (++pivots > kMaxPivots) throw NumericalError("simplex pivot limit reached");
  }

  // Returns false when the objective is unbounded below.
  bool run(double cost_tol) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (d[j] < -cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = t.rows();
      double best = 0.0;
      for (std::size_t i = 0; i < t.rows(); ++i) {
        const double a = t(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, t(i, cols)) / a;
        if (leave == t.rows() || ratio < best - 1e-14 * std::max(1.0, best) ||
            (std::abs(ratio - best) <= 1e-14 * std::max(1.0, best) && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.rows()) return false;
      pivot(leave, enter);
    }
  }
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "OPTIMAL";
    case LpStatus::Infeasible: return "INFEASIBLE";
    case LpStatus::Unbounded: return "UNBOUNDED";
  }
  return "?";
}

FeasibleRegion::FeasibleRegion(std::size_t variables, Matrix ge, std::vector<double> ge_rhs,
                               Matrix eq, std::vector<double> eq_rhs)
    : n_(variables),
      m_ge_(ge.rows()),
      m_eq_(eq.rows()),
      ge_(std::move(ge)),
      eq_(std::move(eq)),
      ge_rhs_(std::move(ge_rhs)),
      eq_rhs_(std::move(eq_rhs)) {
  if ((m_ge_ > 0 && ge_.cols() != n_) || (m_eq_ > 0 && eq_.cols() != n_)) {
    throw StructuralError("constraint column count differs from variable count");
  }
  if (ge_rhs_.size() != m_ge_ || eq_rhs_.size() != m_eq_) {
    throw StructuralError("rhs length differs from constraint row count");
  }
  for (double b : ge_rhs_) if (!std::isfinite(b)) throw DomainError("non-finite rhs");
  for (double b : eq_rhs_) if (!std::isfinite(b)) throw DomainError("non-finite rhs");

  const std::size_t m = m_ge_ + m_eq_;
  const std::size_t cols = n_ + m_ge_ + m;
  tableau_ = Matrix(m, cols + 1);
  basis_.resize(m);
  row_factor_.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool is_ge = r < m_ge_;
    const auto a = is_ge ? ge_.row(r) : eq_.row(r - m_ge_);
    const double b = is_ge ? ge_rhs_[r] : eq_rhs_[r - m_ge_];
    const double scale = max_abs(a) > 0.0 ? 1.0 / max_abs(a) : 1.0;
    const double f = (b < 0.0 ? -1.0 : 1.0) * scale;
    row_factor_[r] = f;
    for (std::size_t j = 0; j < n_; ++j) tableau_(r, j) = f * a[j];
    if (is_ge) tableau_(r, n_ + r) = -f;
    tableau_(r, n_ + m_ge_ + r) = 1.0;
    tableau_(r, cols) = f * b;
    basis_[r] = n_ + m_ge_ + r;
  }

  Simplex s{tableau_, basis_, std::vector<double>(cols + 1, 0.0), cols, n_ + m_ge_};
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n_ + m_ge_; ++j) s.d[j] -= tableau_(r, j);
    s.d[cols] -= tableau_(r, cols);
  }
  s.run(1e-12);
  const double infeasibility = -s.d[cols];
  double rhs_scale = 1.0;
  for (std::size_t r = 0; r < m; ++r) rhs_scale = std::max(rhs_scale, std::abs(tableau_(r, cols)));
  feasible_ = infeasibility <= kTauLp * rhs_scale;

  if (feasible_) {
    // Drive remaining artificials out where some real column can replace
    // them; rows with none are redundant and keep a zero artificial.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis_[r] < n_ + m_ge_) continue;
      std::size_t best = n_ + m_ge_;
      for (std::size_t j = 0; j < n_ + m_ge_; ++j) {
        if (std::abs(tableau_(r, j)) > 1e-9 &&
            (best == n_ + m_ge_ || std::abs(tableau_(r, j)) > std::abs(tableau_(r, best)) + 1e-12)) {
          best = j;
        }
      }
      if (best < n_ + m_ge_) s.pivot(r, best);
    }
  }
  phase1_pivots_ = s.pivots;
}

LpResult FeasibleRegion::optimise(std::span<const double> objective, Sense sense) const {
  if (objective.size() != n_) throw StructuralError("objective length differs from variable count");
  LpResult res;
  res.pivots = phase1_pivots_;
  if (!feasible_) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  const std::size_t m = m_ge_ + m_eq_;
  const std::size_t cols = n_ + m_ge_ + m;
  const double sign = sense == Sense::Max ? -1.0 : 1.0;

  Matrix t = tableau_;
  std::vector<std::size_t> basis = basis_;
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n_; ++j) cost[j] = sign * objective[j];

  Simplex s{t, basis, std::vector<double>(cols + 1, 0.0), cols, n_ + m_ge_};
  for (std::size_t j = 0; j < cols; ++j) s.d[j] = cost[j];
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cost[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= cols; ++j) s.d[j] -= cb * t(r, j);
  }
  const double cost_tol = 1e-11 * std::max(1.0, max_abs(objective));
  const bool bounded = s.run(cost_tol);
  res.pivots += s.pivots;
  if (!bounded) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  res.status = LpStatus::Optimal;
  res.x.assign(n_, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n_) res.x[basis[r]] = std::max(0.0, t(r, cols));
  }
  res.value = kernels::dot(objective, res.x);

  // y_r = -(reduced cost of row r's artificial), undone through the row
  // factor and the min/max sign.
  res.ge_duals.resize(m_ge_);
  res.eq_duals.resize(m_eq_);
  res.dual_value = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double y = -s.d[n_ + m_ge_ + r] * row_factor_[r] * sign;
    if (r < m_ge_) {
      res.ge_duals[r] = y;
      res.dual_value += y * ge_rhs_[r];
    } else {
      res.eq_duals[r - m_ge_] = y;
      res.dual_value += y * eq_rhs_[r - m_ge_];
    }
  }
  res.duality_gap = std::abs(res.value - res.dual_value);

  double worst = 0.0;
  for (std::size_t r = 0; r < m_ge_; ++r) {
    const auto a = ge_.row(r);
    const double scale = max_abs(a) > 0.0 ? max_abs(a) : 1.0;
    worst = std::max(worst, (ge_rhs_[r] - kernels::dot(a, res.x)) / scale);
  }
  for (std::size_t r = 0; r < m_eq_; ++r) {
    const auto a = eq_.row(r);
    const double scale = max_abs(a) > 0.0 ? max_abs(a) : 1.0;
    worst = std::max(worst, std::abs(eq_rhs_[r] - kernels::dot(a, res.x)) / scale);
  }
  res.max_residual = worst;
  return res;
}

LpResult solve(const LinearProgram& lp) {
  const FeasibleRegion region(lp.variables(), lp.ge, lp.ge_rhs, lp.eq, lp.eq_rhs);
  return region.optimise(lp.objective, lp.sense);
}

std::string dump(const LinearProgram& lp) {
  std::ostringstream out;
  out.precision(12);
  auto linear = [&](std::span<const double> a) {
    bool first = true;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] == 0.0) continue;
      out << (first ? "" : " + ") << a[j] << "*x" << (j + 1);
      first = false;
    }
    if (first) out << "0";
  };
  out << (lp.sense == Sense::Min ? "min " : "max ");
  linear(lp.objective);
  out << "\ns.t.\n";
  for (std::size_t r = 0; r < lp.ge.rows(); ++r) {
    out << "  ";
    linear(lp.ge.row(r));
    out << " >= " << lp.ge_rhs[r] << "\n";
  }
  for (std::size_t r = 0; r < lp.eq.rows(); ++r) {
    out << "  ";
    linear(lp.eq.row(r));
    out << " = " << lp.eq_rhs[r] << "\n";
  }
  out << "  x >= 0\n";
  return out.str();
}

}  // namespace refcon

#include "refcon/indices.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "refcon/error.hpp"
#include "refcon/kernels.hpp"

namespace refcon {
namespace {

IndexMatrix blank(const PooledDataset& data, IndexMethod method) {
  IndexMatrix m;
  m.method = method;
  for (const auto& o : data.observations()) m.ids.push_back(o.id);
  m.values = Matrix::identity(data.size());
  return m;
}

// out(i, j) = prod_l (b(i, l) / b(j, l))^(1/N), the transitive closure used
// by GEKS and CCD for reversible bilateral matrices.
IndexMatrix geometric_transitivize(const IndexMatrix& b, IndexMethod method) {
  const std::size_t n = b.size();
  std::vector<double> potential(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) potential[i] += std::log(b.values(i, l));
    potential[i] /= static_cast<double>(n);
  }
  IndexMatrix out = b;
  out.method = method;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.values(i, j) = i == j ? 1.0 : std::exp(potential[i] - potential[j]);
    }
  }
  return out;
}

}  // namespace

const char* to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::Fisher: return "fisher";
    case IndexMethod::Geks: return "geks";
    case IndexMethod::Tornqvist: return "tornqvist";
    case IndexMethod::Ccd: return "ccd";
    case IndexMethod::GearyKhamis: return "gk";
    case IndexMethod::MarketRate: return "market";
    case IndexMethod::Gss: return "gss";
    case IndexMethod::Homothetic: return "homothetic";
  }
  return "?";
}

std::optional<IndexMethod> parse_index_method(const std::string& name) {
  for (auto m : {IndexMethod::Fisher, IndexMethod::Geks, IndexMethod::Tornqvist, IndexMethod::Ccd,
                 IndexMethod::GearyKhamis, IndexMethod::MarketRate, IndexMethod::Gss,
                 IndexMethod::Homothetic}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

IndexMatrix fisher(const PooledDataset& data) {
  const std::size_t n = data.size();
  IndexMatrix m = blank(data, IndexMethod::Fisher);
  Matrix x(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      x(a, b) = kernels::dot(data[a].prices, data[b].quantities);
      if (!(x(a, b) > 0.0)) {
        throw DomainError("zero inner product between '" + data[a].id + "' and '" + data[b].id + "'");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      m.values(i, j) = std::sqrt((x(i, i) / x(j, i)) * (x(i, j) / x(j, j)));
    }
  }
  return m;
}

IndexMatrix geks(const PooledDataset& data) {
  return geometric_transitivize(fisher(data), IndexMethod::Geks);
}

IndexMatrix tornqvist(const PooledDataset& data) {
  const std::size_t n = data.size();
  const std::size_t K = data.goods();
  IndexMatrix m = blank(data, IndexMethod::Tornqvist);
  Matrix share(n, K), logp(n, K);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) {
      share(i, k) = data[i].prices[k] * data[i].quantities[k] / data.expenditure(i);
      logp(i, k) = std::log(data[i].prices[k]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        s += 0.5 * (share(i, k) + share(j, k)) * (logp(i, k) - logp(j, k));
      }
      m.values(i, j) = std::exp(s);
      m.values(j, i) = std::exp(-s);
    }
  }
  return m;
}

IndexMatrix ccd(const PooledDataset& data) {
  return geometric_transitivize(tornqvist(data), IndexMethod::Ccd);
}

IndexMatrix market_rates(const PooledDataset& data) {
  std::string missing;
  for (const auto& o : data.observations()) {
    if (!o.market_rate) missing += (missing.empty() ? "" : ", ") + o.id;
  }
  if (!missing.empty()) throw ConfigurationError("market rate missing for: " + missing);
  IndexMatrix m = blank(data, IndexMethod::MarketRate);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (i != j) m.values(i, j) = *data[i].market_rate / *data[j].market_rate;
    }
  }
  return m;
}

GearyKhamisResult geary_khamis_system(const PooledDataset& data, GkSolver solver) {
  const std::size_t n = data.size();
  const std::size_t K = data.goods();
  if (n < 1) throw EmptyDatasetError("no countries");

  GearyKhamisResult res;
  std::vector<std::size_t> kept;
  std::vector<double> world_q;
  for (std::size_t k = 0; k < K; ++k) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += data[i].quantities[k];
    if (q > 0.0) {
      kept.push_back(k);
      world_q.push_back(q);
    } else {
      res.dropped_headings.push_back(k);
    }
  }
  const std::size_t kk = kept.size();
  const std::size_t base = data.base();

  // x_n = 1 / PPP_n satisfies x = A B x, A(n, k) = q_nk / m_n,
  // B(k, l) = m_lk / Q_k.
  auto intl_prices = [&](const std::vector<double>& x) {
    std::vector<double> pi(kk, 0.0);
    for (std::size_t c = 0; c < kk; ++c) {
      const std::size_t k = kept[c];
      for (std::size_t l = 0; l < n; ++l) {
        pi[c] += data[l].prices[k] * data[l].quantities[k] * x[l];
      }
      pi[c] /= world_q[c];
    }
    return pi;
  };
  auto step = [&](const std::vector<double>& x) {
    const auto pi = intl_prices(x);
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < kk; ++c) next[i] += pi[c] * data[i].quantities[kept[c]];
      next[i] /= data.expenditure(i);
    }
    const double scale = next[base];
    if (!(scale > 0.0)) {
      throw NumericalError("base country has no quantity in any heading with world volume");
    }
    for (double& v : next) v /= scale;
    return next;
  };

  std::vector<double> x(n, 1.0);
  if (solver == GkSolver::Iterative) {
    constexpr double damping = 0.7;
    constexpr std::size_t max_iter = 10000;
    for (std::size_t it = 1;; ++it) {
      const auto fx = step(x);
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        change = std::max(change, std::abs(fx[i] - x[i]) / fx[i]);
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = (1.0 - damping) * x[i] + damping * fx[i];
      res.iterations = it;
      res.residual = change;
      if (change < 1e-12) break;
      if (it >= max_iter) {
        throw NumericalError("Geary-Khamis iteration did not converge; residual " +
                             std::to_string(change));
      }
    }
  } else {
    Eigen::MatrixXd A(n, kk), B(kk, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < kk; ++c) {
        const std::size_t k = kept[c];
        A(i, c) = data[i].quantities[k] / data.expenditure(i);
        B(c, i) = data[i].prices[k] * data[i].quantities[k] / world_q[c];
      }
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - A * B;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    M.row(base).setZero();
    M(base, base) = 1.0;
    rhs(base) = 1.0;
    const Eigen::VectorXd sol = M.fullPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i) x[i] = sol(i);
    const auto fx = step(x);
    for (std::size_t i = 0; i < n; ++i) {
      res.residual = std::max(res.residual, std::abs(fx[i] - x[i]) / std::abs(fx[i]));
    }
    res.iterations = 1;
    if (!(res.residual < 1e-8)) {
      throw NumericalError("Geary-Khamis direct solve is singular; residual " +
                           std::to_string(res.residual));
    }
  }

  res.ppp.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.ppp[i] = 1.0 / x[i];
  res.international_prices = intl_prices(x);
  res.index = blank(data, IndexMethod::GearyKhamis);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) res.index.values(i, j) = res.ppp[i] / res.ppp[j];
    }
  }
  return res;
}

IndexMatrix geary_khamis(const PooledDataset& data) {
  return geary_khamis_system(data).index;
}

double circularity_residual(const Matrix& v) {
  const std::size_t n = v.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(v(i, k) - v(i, j) * v(j, k)) / v(i, k));
      }
    }
  }
  return worst;
}

std::vector<double> relative_to_base(const IndexMatrix& m, std::size_t base) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m.values(i, base);
  return out;
}

}  // namespace refcon

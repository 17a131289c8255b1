#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "refcon/dataset.hpp"
#include "refcon/matrix.hpp"

namespace refcon {

enum class IndexMethod { Fisher, Geks, Tornqvist, Ccd, GearyKhamis, MarketRate, Gss, Homothetic };

const char* to_string(IndexMethod m);
std::optional<IndexMethod> parse_index_method(const std::string& name);

// values(i, j) is the price level of i relative to j, i.e. i-currency per
// j-currency at equal utility. Diagonal is 1.
struct IndexMatrix {
  IndexMethod method = IndexMethod::Fisher;
  std::vector<std::string> ids;
  Matrix values;

  std::size_t size() const { return ids.size(); }
};

IndexMatrix fisher(const PooledDataset& data);
IndexMatrix geks(const PooledDataset& data);
IndexMatrix tornqvist(const PooledDataset& data);
IndexMatrix ccd(const PooledDataset& data);
IndexMatrix market_rates(const PooledDataset& data);

struct GearyKhamisResult {
  IndexMatrix index;
  std::vector<double> ppp;                 // per country, base = 1
  std::vector<double> international_prices;  // per kept heading
  std::vector<std::size_t> dropped_headings; // zero world quantity
  std::size_t iterations = 0;
  double residual = 0.0;
};

enum class GkSolver { Iterative, Direct };

// Per-capita quantities, PPP_base = 1. The iterative route stops at relative
// change below 1e-12; NumericalError after 10000 iterations.
GearyKhamisResult geary_khamis_system(const PooledDataset& data,
                                      GkSolver solver = GkSolver::Iterative);
IndexMatrix geary_khamis(const PooledDataset& data);

// Largest |v(i,k) - v(i,j) v(j,k)| / v(i,k) over all triples.
double circularity_residual(const Matrix& values);

// values(i, base) for every i: the table as published against one country.
std::vector<double> relative_to_base(const IndexMatrix& m, std::size_t base);

}  // namespace refcon

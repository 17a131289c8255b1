#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "refcon/error.hpp"
#include "refcon/indices.hpp"

using namespace refcon;
using oracle::fixture;

namespace {

double fisher_oracle(const PooledDataset& d, std::size_t i, std::size_t j) {
  auto x = [&](std::size_t a, std::size_t b) { return oracle::dot(d[a].prices, d[b].quantities); };
  return std::sqrt(x(i, i) / x(j, i) * x(i, j) / x(j, j));
}

double tornqvist_oracle(const PooledDataset& d, std::size_t i, std::size_t j) {
  double lg = 0.0;
  for (std::size_t k = 0; k < d.goods(); ++k) {
    const double si = d[i].prices[k] * d[i].quantities[k] / d.expenditure(i);
    const double sj = d[j].prices[k] * d[j].quantities[k] / d.expenditure(j);
    lg += 0.5 * (si + sj) * std::log(d[i].prices[k] / d[j].prices[k]);
  }
  return std::exp(lg);
}

// Transitive closure of a bilateral formula by geometric mean over bridges.
template <class F>
double bridged(const PooledDataset& d, std::size_t i, std::size_t j, F bilateral) {
  double lg = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) lg += std::log(bilateral(d, i, k) * bilateral(d, k, j));
  return std::exp(lg / static_cast<double>(d.size()));
}

}  // namespace

TEST_CASE("Fisher on the worked example") {
  const PooledDataset abc = load_direct(fixture("abc.csv"));
  const IndexMatrix f = fisher(abc);
  CHECK(f.values(0, 1) == doctest::Approx(1.004).epsilon(1e-3));
  CHECK(f.values(0, 2) == doctest::Approx(0.760).epsilon(1e-3));
  CHECK(f.values(2, 1) == doctest::Approx(1.429).epsilon(1e-3));
  CHECK(circularity_residual(f.values) > 1e-3);  // Fisher is not transitive
}

TEST_CASE("GEKS on the worked example") {
  const PooledDataset abc = load_direct(fixture("abc.csv"));
  const IndexMatrix g = geks(abc);
  CHECK(g.values(0, 1) == doctest::Approx(1.030).epsilon(1e-3));
  CHECK(g.values(0, 2) == doctest::Approx(0.740).epsilon(1e-3));
  CHECK(g.values(2, 1) == doctest::Approx(1.392).epsilon(1e-3));
  CHECK(g.values(1, 2) == doctest::Approx(0.719).epsilon(1e-3));
}

TEST_CASE("formulas match their definitions on random data") {
  oracle::Generator gen(301);
  for (int rep = 0; rep < 10; ++rep) {
    const PooledDataset d = gen.random(gen.pick(2, 8), gen.pick(1, 5));
    const IndexMatrix f = fisher(d), g = geks(d), t = tornqvist(d), c = ccd(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        CHECK(f.values(i, j) == doctest::Approx(fisher_oracle(d, i, j)).epsilon(1e-12));
        CHECK(t.values(i, j) == doctest::Approx(tornqvist_oracle(d, i, j)).epsilon(1e-12));
        CHECK(g.values(i, j) == doctest::Approx(bridged(d, i, j, fisher_oracle)).epsilon(1e-12));
        CHECK(c.values(i, j) == doctest::Approx(bridged(d, i, j, tornqvist_oracle)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("reversal, identity and circularity") {
  oracle::Generator gen(311);
  const PooledDataset d = gen.rationalisable(7, 4);
  for (const IndexMatrix& m : {fisher(d), geks(d), tornqvist(d), ccd(d), geary_khamis(d), market_rates(d)}) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(m.values(i, i) == doctest::Approx(1.0));
      for (std::size_t j = 0; j < d.size(); ++j) {
        CHECK(m.values(i, j) * m.values(j, i) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK(circularity_residual(geks(d).values) < 1e-12);
  CHECK(circularity_residual(ccd(d).values) < 1e-12);
  CHECK(circularity_residual(geary_khamis(d).values) < 1e-10);
  CHECK(circularity_residual(market_rates(d).values) < 1e-12);
}

TEST_CASE("two countries collapse the multilateral formulas") {
  oracle::Generator gen(321);
  const PooledDataset d = gen.random(2, 4);
  CHECK(geks(d).values(0, 1) == doctest::Approx(fisher(d).values(0, 1)).epsilon(1e-12));
  CHECK(ccd(d).values(0, 1) == doctest::Approx(tornqvist(d).values(0, 1)).epsilon(1e-12));
}

TEST_CASE("Geary-Khamis solvers agree and satisfy additivity") {
  oracle::Generator gen(331);
  for (int rep = 0; rep < 10; ++rep) {
    const PooledDataset d = gen.random(gen.pick(2, 10), gen.pick(1, 6));
    const auto it = geary_khamis_system(d, GkSolver::Iterative);
    const auto dir = geary_khamis_system(d, GkSolver::Direct);
    REQUIRE(it.ppp.size() == d.size());
    CHECK(it.ppp[d.base()] == doctest::Approx(1.0));
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(it.ppp[i] == doctest::Approx(dir.ppp[i]).epsilon(1e-9));
      // Real expenditure at international prices equals nominal over PPP.
      const double real = oracle::dot(it.international_prices, d[i].quantities);
      CHECK(real == doctest::Approx(d.expenditure(i) / it.ppp[i]).epsilon(1e-9));
      for (std::size_t j = 0; j < d.size(); ++j) {
        CHECK(it.index.values(i, j) == doctest::Approx(it.ppp[i] / it.ppp[j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Geary-Khamis special cases") {
  SUBCASE("one good gives the price ratio") {
    const PooledDataset d({oracle::obs("A", {2.0}, {3.0}), oracle::obs("B", {5.0}, {1.0}),
                           oracle::obs("C", {0.5}, {7.0})},
                          "A");
    const IndexMatrix m = geary_khamis(d);
    CHECK(m.values(1, 0) == doctest::Approx(2.5));
    CHECK(m.values(2, 1) == doctest::Approx(0.1));
  }
  SUBCASE("identical countries are at parity") {
    const PooledDataset d({oracle::obs("A", {1.0, 2.0}, {3.0, 4.0}), oracle::obs("B", {1.0, 2.0}, {3.0, 4.0})}, "A");
    CHECK(geary_khamis(d).values(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("headings nobody buys are dropped") {
    const PooledDataset d({oracle::obs("A", {1.0, 2.0}, {3.0, 0.0}), oracle::obs("B", {2.0, 9.0}, {1.0, 0.0})}, "A");
    const auto r = geary_khamis_system(d);
    CHECK(r.dropped_headings == std::vector<std::size_t>{1});
    CHECK(r.index.values(1, 0) == doctest::Approx(2.0));
  }
}

TEST_CASE("market rates come from the auxiliary file") {
  const PooledDataset d =
      convert(ingest_icp(fixture("icp/ppp.csv"), fixture("icp/expenditure.csv"), "USA", fixture("icp/aux.csv")));
  const IndexMatrix m = market_rates(d);
  CHECK(m.values(d.index_of("CHN"), d.index_of("USA")) == doctest::Approx(6.759));
  CHECK(relative_to_base(m, d.index_of("USA"))[d.index_of("DEU")] == doctest::Approx(0.85));
  CHECK_THROWS_AS(market_rates(load_direct(fixture("abc.csv"))), ConfigurationError);
}

TEST_CASE("method names round-trip") {
  for (IndexMethod m : {IndexMethod::Fisher, IndexMethod::Geks, IndexMethod::Tornqvist, IndexMethod::Ccd,
                        IndexMethod::GearyKhamis, IndexMethod::MarketRate, IndexMethod::Gss,
                        IndexMethod::Homothetic}) {
    CHECK(parse_index_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_index_method("laspeyres"));
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "refcon/error.hpp"
#include "refcon/gss.hpp"
#include "refcon/rpgraph.hpp"

using namespace refcon;
using oracle::fixture;

namespace {

PooledDataset hub_of(const PooledDataset& d, std::vector<std::size_t> idx) { return d.subset(idx); }

}  // namespace

TEST_CASE("star example: hub, revealed-worse set and extension") {
  const PooledDataset star = load_direct(fixture("star4.csv"));
  const PooledDataset hub = hub_of(star, {0, 1, 2});
  const auto r = gss_outside(hub, star[3], 0);
  CHECK(r.status == ExtensionStatus::Extended);
  CHECK(std::find(r.vrw.begin(), r.vrw.end(), 0) != r.vrw.end());
  CHECK(std::find(r.vrw.begin(), r.vrw.end(), 2) != r.vrw.end());
  REQUIRE(r.forecast.size() == 2);
  CHECK(r.forecast[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.forecast[1] == doctest::Approx(27.0));
  CHECK(r.lower == doctest::Approx(0.870).epsilon(1e-3));
  CHECK(r.upper == doctest::Approx(2.25));
  CHECK(r.value == doctest::Approx(1.399).epsilon(1e-3));
  CHECK(r.value == doctest::Approx(std::sqrt(r.lower * r.upper)));
}

TEST_CASE("full run on the star example") {
  const GSSResult g = gss_full(load_direct(fixture("star4.csv")));
  CHECK(g.hub == std::vector<std::size_t>{0, 1, 2});
  CHECK(g.in_hub == std::vector<bool>{true, true, true, false});
  CHECK(g.anchor == 0);
  REQUIRE(g.outside.size() == 1);
  CHECK(g.outside[0].country == 3);
  CHECK(g.outside[0].accumulated);
  REQUIRE(g.table.size() == 4);
  const auto& d = g.table[3];
  CHECK(d.country == "D");
  CHECK_FALSE(d.in_hub);
  CHECK(d.status == ExtensionStatus::Extended);
  CHECK(d.ppp_vs_base == doctest::Approx(1.0 / 1.399).epsilon(1e-3));
  CHECK(d.lower == doctest::Approx(1.0 / 2.25));
  CHECK(d.upper == doctest::Approx(1.0 / 0.870).epsilon(1e-3));
  CHECK(g.table[0].ppp_vs_base == doctest::Approx(1.0));
  CHECK(circularity_residual(g.index.values) < 1e-12);
  CHECK(g.index.values(3, 0) == doctest::Approx(d.ppp_vs_base));
  for (const auto& row : g.table) {
    CHECK(row.lower <= row.ppp_vs_base * (1 + 1e-12));
    CHECK(row.ppp_vs_base <= row.upper * (1 + 1e-12));
  }
}

TEST_CASE("the forecast bundle exhausts the outsider's budget") {
  oracle::Generator gen(501);
  int extended = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const PooledDataset d = gen.rationalisable(gen.pick(3, 7), gen.pick(2, 4));
    std::vector<std::size_t> idx(d.size() - 1);
    std::iota(idx.begin(), idx.end(), 0);
    const PooledDataset hub = d.subset(idx);
    const auto& out = d[d.size() - 1];
    const OutsiderExtension ext(hub, out);
    for (std::size_t t = 0; t < hub.size(); ++t) {
      const auto r = gss_outside(hub, out, t);
      if (r.status != ExtensionStatus::Extended) continue;
      ++extended;
      CHECK(oracle::dot(out.prices, r.forecast) == doctest::Approx(ext.expenditure()).epsilon(1e-9));
      CHECK(r.lower <= r.upper * (1 + 1e-9));
      for (std::size_t u : ext.revealed_worse()) {
        CHECK(oracle::dot(hub[u].prices, r.forecast) >= hub.expenditure(u) * (1 - 1e-9));
      }
    }
  }
  CHECK(extended > 20);
}

TEST_CASE("a consistent dataset is all hub") {
  const PooledDataset abc = load_direct(fixture("abc.csv"));
  const GSSResult g = gss_full(abc);
  CHECK(g.hub.size() == 3);
  CHECK(g.outside.empty());
  const IndexMatrix h = gss_hub(bound_matrix(abc, BoundStyle::Laspeyres));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(g.table[i].status == ExtensionStatus::Hub);
    CHECK(g.table[i].ppp_vs_base == doctest::Approx(h.values(i, 0)));
  }
}

TEST_CASE("identical outsiders receive identical valuations") {
  const PooledDataset star = load_direct(fixture("star4.csv"));
  CountryObservation twin = star[3];
  twin.id = "E";
  const GSSResult g = gss_full(star.with_observation(twin));
  REQUIRE(g.table.size() == 5);
  CHECK(g.table[4].status == g.table[3].status);
  CHECK(g.table[4].ppp_vs_base == doctest::Approx(g.table[3].ppp_vs_base).epsilon(1e-9));
}

TEST_CASE("an outsider without extension has an open upper bound") {
  // The outsider's whole budget line lies below what the hub demands.
  const PooledDataset hub({oracle::obs("A", {1.0, 1.0}, {5.0, 5.0})}, "A");
  const CountryObservation poor = oracle::obs("P", {1.0, 1.0}, {1.0, 1.0});
  const CountryObservation rich = oracle::obs("R", {1.0, 2.0}, {20.0, 20.0});
  const auto rr = gss_outside(hub, rich, 0);
  CHECK(rr.status == ExtensionStatus::Extended);
  const auto rp = gss_outside(hub, poor, 0);
  CHECK(rp.lower > 0.0);
  if (rp.status == ExtensionStatus::NoExtension) {
    CHECK(std::isinf(rp.upper));
    CHECK(std::isnan(rp.value));
  }
  CHECK(std::string(to_string(ExtensionStatus::NoExtension)) == "no_extension");
}

TEST_CASE("homothetic bounds collapse to Fisher for two countries") {
  oracle::Generator gen(511);
  const PooledDataset d = gen.homothetic(2, 3);
  const std::vector<std::size_t> hub{0, 1};
  const auto h = gss_homothetic(d, hub);
  const double f = fisher(d).values(0, 1);
  CHECK(h.pairwise(0, 1) == doctest::Approx(f).epsilon(1e-12));
  CHECK(h.index.values(0, 1) == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("homothetic bounds are minimum path products") {
  oracle::Generator gen(521);
  for (int rep = 0; rep < 10; ++rep) {
    const PooledDataset d = gen.homothetic(gen.pick(2, 7), 3);
    std::vector<std::size_t> hub(d.size());
    std::iota(hub.begin(), hub.end(), 0);
    const auto h = gss_homothetic(d, hub);
    const std::size_t n = d.size();
    oracle::Mat e(n, oracle::Vec(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        e[a][b] = oracle::dot(d[a].prices, d[b].quantities) / d.expenditure(b);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(h.upper(i, j) == doctest::Approx(oracle::min_path_product(e, i, j)).epsilon(1e-10));
        CHECK(h.lower(i, j) == doctest::Approx(1.0 / h.upper(j, i)).epsilon(1e-12));
        CHECK(h.lower(i, j) <= h.upper(i, j) * (1 + 1e-9));
        for (std::size_t k = 0; k < n; ++k) {
          CHECK(h.upper(i, k) <= h.upper(i, j) * h.upper(j, k) * (1 + 1e-12));
        }
      }
    }
    CHECK(circularity_residual(h.index.values) < 1e-12);
  }
}

TEST_CASE("homothetic valuation refuses a HARP violation") {
  const PooledDataset d = load_direct(fixture("cycle3.csv"));
  const std::vector<std::size_t> all{0, 1, 2};
  CHECK_THROWS_AS(gss_homothetic(d, all), InconsistentDataError);
}

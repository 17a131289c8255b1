#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "refcon/csv.hpp"
#include "refcon/dataset.hpp"
#include "refcon/error.hpp"

using namespace refcon;
using oracle::fixture;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "refcon_dataset_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("csv parsing handles quotes, blank lines and missing markers") {
  const auto t = csv::parse("a,\"b,c\",\"say \"\"hi\"\"\"\n\n1,NA,\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "b,c");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(csv::is_missing(t.rows[1][1]));
  CHECK(csv::is_missing(t.rows[1][2]));
  CHECK(csv::to_double("1.5e3", t, 0, 0) == 1500.0);
  CHECK(csv::to_double("+2", t, 0, 0) == 2.0);
  CHECK(csv::escape("x,y") == "\"x,y\"");
  CHECK(csv::format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("malformed numbers report file, row and column") {
  try {
    ingest_icp(fixture("icp/bad_number.csv"), fixture("icp/expenditure.csv"), "USA");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("bad_number.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_icp(fixture("icp/bad_quote.csv"), fixture("icp/expenditure.csv"), "USA"),
                  ParseError);
}

TEST_CASE("two-by-two tables are echoed with labels") {
  const auto ppp = temp_file("p.csv", "heading,X,Y\nh1,1,2\nh2,3,4\n");
  const auto exp = temp_file("e.csv", "heading,Y,X\nh2,40,30\nh1,20,10\n");
  const RawICPTable raw = ingest_icp(ppp, exp, "X");
  CHECK(raw.headings() == 2);
  CHECK(raw.countries() == 2);
  CHECK(raw.heading_labels == std::vector<std::string>{"h1", "h2"});
  CHECK(raw.ppp(1, 1) == 4.0);
  CHECK(raw.expenditure(0, 1) == 20.0);  // aligned to the PPP column order
  CHECK(raw.expenditure(1, 0) == 30.0);
}

TEST_CASE("a missing PPP cell is flagged, not zeroed") {
  const RawICPTable raw = ingest_icp(fixture("icp/ppp_gap.csv"), fixture("icp/expenditure.csv"), "USA");
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < raw.headings(); ++k) {
    for (std::size_t n = 0; n < raw.countries(); ++n) flagged += raw.ppp_is_missing(k, n);
  }
  CHECK(flagged == 2);
  CHECK(raw.ppp_is_missing(1, 1));  // Meat, CHN ("NA")
  CHECK(raw.ppp_is_missing(2, 2));  // Clothing, DEU (empty)

  ConversionReport rep;
  const PooledDataset d = convert(raw, &rep);
  CHECK(d.size() == 1);
  CHECK(rep.dropped_countries == std::vector<std::string>{"CHN", "DEU"});
}

TEST_CASE("a country absent from the PPP table is a structural error naming it") {
  try {
    ingest_icp(fixture("icp/ppp_missing_country.csv"), fixture("icp/expenditure.csv"), "USA");
    FAIL("expected a structural error");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("CHN") != std::string::npos);
  }
}

TEST_CASE("conversion divides expenditure by PPP and drops negative headings") {
  const RawICPTable raw = ingest_icp(fixture("icp/ppp.csv"), fixture("icp/expenditure.csv"), "USA",
                                     fixture("icp/aux.csv"));
  ConversionReport rep;
  const PooledDataset d = convert(raw, &rep);
  CHECK(d.goods() == 3);
  CHECK(rep.dropped_headings == std::vector<std::string>{"Net purchases abroad"});
  CHECK(d.heading_labels() ==
        std::vector<std::string>{"Bread and cereals", "Meat", "Clothing"});
  const auto& chn = d[d.index_of("CHN")];
  CHECK(chn.prices[0] == 4.2);
  CHECK(chn.quantities[0] == doctest::Approx(2100 / 4.2));
  CHECK(*chn.population == 1412);
  CHECK(*chn.market_rate == 6.759);
  // Expenditure totals survive the round trip for kept headings.
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t col = static_cast<std::size_t>(
        std::find(raw.country_labels.begin(), raw.country_labels.end(), d[i].id) -
        raw.country_labels.begin());
    double e = 0.0;
    for (std::size_t k = 0; k < 3; ++k) e += raw.expenditure(k, col);
    CHECK(std::abs(d.expenditure(i) - e) <= 1e-12 * e);
  }
}

TEST_CASE("unit PPPs give quantities equal to expenditures") {
  const auto ppp = temp_file("p1.csv", "heading,X\nh1,1\nh2,1\n");
  const auto exp = temp_file("e1.csv", "heading,X\nh1,10\nh2,20\n");
  const PooledDataset d = convert(ingest_icp(ppp, exp, "X"));
  CHECK(d[0].quantities == std::vector<double>{10, 20});
}

TEST_CASE("single country with e=(10,20), pi=(2,4) gives p=(2,4), q=(5,5)") {
  const auto ppp = temp_file("p2.csv", "heading,X\nh1,2\nh2,4\n");
  const auto exp = temp_file("e2.csv", "heading,X\nh1,10\nh2,20\n");
  const PooledDataset d = convert(ingest_icp(ppp, exp, "X"));
  CHECK(d[0].prices == std::vector<double>{2, 4});
  CHECK(d[0].quantities == std::vector<double>{5, 5});
}

TEST_CASE("excluding the base or every country is reported") {
  const auto ppp = temp_file("p3.csv", "heading,X,Y\nh1,NA,1\nh2,1,1\n");
  const auto exp = temp_file("e3.csv", "heading,X,Y\nh1,1,1\nh2,1,1\n");
  CHECK_THROWS_AS(convert(ingest_icp(ppp, exp, "X")), ConfigurationError);
  const auto ppp2 = temp_file("p4.csv", "heading,X\nh1,NA\n");
  const auto exp2 = temp_file("e4.csv", "heading,X\nh1,1\n");
  CHECK_THROWS_AS(convert(ingest_icp(ppp2, exp2, "X")), EmptyDatasetError);
}

TEST_CASE("adding a missing price never brings a country back") {
  const RawICPTable raw = ingest_icp(fixture("icp/ppp.csv"), fixture("icp/expenditure.csv"), "USA");
  ConversionReport before;
  convert(raw, &before);
  RawICPTable worse = raw;
  worse.ppp_missing[0 * worse.countries() + 2] = true;
  ConversionReport after;
  const PooledDataset d = convert(worse, &after);
  for (const auto& c : before.dropped_countries) {
    CHECK(std::find(after.dropped_countries.begin(), after.dropped_countries.end(), c) !=
          after.dropped_countries.end());
  }
  for (const auto& o : d.observations()) {
    for (std::size_t k = 0; k < d.goods(); ++k) {
      CHECK(o.prices[k] > 0.0);
      CHECK(!std::isnan(o.quantities[k]));
    }
  }
}

TEST_CASE("direct format loads the worked examples") {
  const PooledDataset abc = load_direct(fixture("abc.csv"));
  CHECK(abc.size() == 3);
  CHECK(abc.base_id() == "A");
  CHECK(abc[1].prices == std::vector<double>{7, 7});
  CHECK(abc[2].quantities == std::vector<double>{1, 9});
  const PooledDataset three = load_direct(fixture("consistent3.csv"), std::string("2"));
  CHECK(three.size() == 3);
  CHECK(three.base() == 1);
  CHECK(three[2].quantities == std::vector<double>{1000, 10});
}

TEST_CASE("direct format rejects empty files and non-positive prices") {
  CHECK_THROWS_AS(load_direct(temp_file("empty.csv", "")), EmptyDatasetError);
  CHECK_THROWS_AS(load_direct(temp_file("neg.csv", "A,0,1,1,1\n")), ValidationError);
  CHECK_THROWS_AS(load_direct(temp_file("negq.csv", "A,1,1,-1,1\n")), ValidationError);
  CHECK_THROWS_AS(load_direct(temp_file("dup.csv", "A,1,1,1,1\nA,1,1,1,1\n")), ValidationError);
  CHECK_THROWS_AS(load_direct(temp_file("zero.csv", "A,1,1,0,0\n")), ValidationError);
  CHECK_THROWS_AS(load_direct(temp_file("odd.csv", "A,1,1,1\n")), ParseError);
  CHECK_THROWS_AS(load_direct(fixture("abc.csv"), std::string("Z")), ConfigurationError);
}

TEST_CASE("subsets keep the base when selected") {
  const PooledDataset d = load_direct(fixture("star4.csv"));
  const std::vector<std::size_t> pick{2, 0};
  const PooledDataset s = d.subset(pick);
  CHECK(s.size() == 2);
  CHECK(s[0].id == "C");
  CHECK(s.base_id() == "A");
  const std::vector<std::size_t> other{3, 1};
  CHECK(d.subset(other).base_id() == "D");
  CHECK(d.with_base("C").base() == 2);
  const PooledDataset aux = apply_aux(d, fixture("star4_aux.csv"));
  CHECK(*aux[3].population == 1.0);
  CHECK(*aux[1].market_rate == 1.2);
}

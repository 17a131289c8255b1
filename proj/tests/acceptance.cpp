// Acceptance runner: one PASS / FAIL / SKIP line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "refcon/aggregates.hpp"
#include "refcon/appraisal.hpp"
#include "refcon/bounds.hpp"
#include "refcon/csv.hpp"
#include "refcon/gss.hpp"
#include "refcon/indices.hpp"
#include "refcon/rpgraph.hpp"

using namespace refcon;
using oracle::fixture;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

// Collects the first failed expectation of a criterion.
class Probe {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      expect(false, s.str());
    }
  }
  Outcome outcome(std::string note = {}) const {
    if (!failure_.empty()) return {Verdict::Fail, failure_};
    return {Verdict::Pass, std::move(note)};
  }

 private:
  std::string failure_;
};

bool rel_le(double a, double b, double tol) { return a <= b + tol * std::max(1.0, std::abs(b)); }

Outcome worked_example() {
  Probe p;
  const PooledDataset abc = load_direct(fixture("abc.csv"));
  const IndexMatrix f = fisher(abc);
  const IndexMatrix g = geks(abc);
  p.near(f.values(0, 1), 1.004, 1e-3, "F_AB");
  p.near(f.values(0, 2), 0.760, 1e-3, "F_AC");
  p.near(f.values(2, 1), 1.429, 1e-3, "F_CB");
  p.near(g.values(0, 1), 1.030, 1e-3, "G_AB");
  p.near(g.values(0, 2), 0.740, 1e-3, "G_AC");
  p.near(g.values(2, 1), 1.392, 1e-3, "G_CB");
  p.near(g.values(1, 2), 0.719, 1e-3, "G_BC");
  const BoundMatrix bm = bound_matrix(abc, BoundStyle::Laspeyres);
  p.near(bm.classical_upper(1, 2), 0.7, 1e-12, "L_BC");
  const auto r = appraise(g, bm);
  p.expect(r.per_pair[1 * 3 + 2].side == Side::Upper, "GEKS (B, C) not flagged above its upper bound");
  return p.outcome();
}

Outcome cycle_examples() {
  Probe p;
  const RPGraph a = build_graph(load_direct(fixture("consistent3.csv")));
  const double want[3][3] = {{1.0, 33.67, 336.67}, {0.51, 1.0, 500.05}, {0.10, 5.00, 1.0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      p.near(a.weights(i, j), want[i][j], 0.005, "weight " + std::to_string(i + 1) + "->" + std::to_string(j + 1));
    }
  }
  p.expect(check_cewec(a).satisfied, "first example should satisfy the cycle condition");

  const auto b = check_cewec(build_graph(load_direct(fixture("cycle3.csv"))));
  p.expect(!b.satisfied, "second example should violate");
  p.expect(b.witness && b.witness->vertices.size() == 3, "second example witness should have 3 vertices");

  const PooledDataset c = load_direct(fixture("pairs4.csv"));
  const RPGraph gc = build_graph(c);
  p.expect(!check_cewec(gc).satisfied, "third example should violate");
  const std::vector<std::size_t> first{0, 1}, second{2, 3};
  p.expect(check_cewec(induced_subgraph(gc, first)).satisfied, "pair {1,2} should pass");
  p.expect(check_cewec(induced_subgraph(gc, second)).satisfied, "pair {3,4} should pass");
  return p.outcome();
}

Outcome star_example() {
  Probe p;
  const PooledDataset star = load_direct(fixture("star4.csv"));
  const GSSResult g = gss_full(star);
  p.expect(g.hub == std::vector<std::size_t>{0, 1, 2}, "hub should be {A,B,C}");
  p.expect(g.outside.size() == 1 && g.outside[0].country == 3, "D should be the only outsider");
  if (g.outside.size() == 1) {
    const auto& r = g.outside[0].result;
    auto has = [&](std::size_t v) { return std::find(r.vrw.begin(), r.vrw.end(), v) != r.vrw.end(); };
    p.expect(has(0) && has(2), "revealed-worse set of D should contain A and C");
    p.expect(r.forecast.size() == 2, "forecast has two goods");
    if (r.forecast.size() == 2) {
      p.near(r.forecast[0], 0.0, 1e-9, "q*_1");
      p.near(r.forecast[1], 27.0, 1e-9, "q*_2");
    }
    p.near(r.value, 1.399, 1e-3, "GSS value");
  }
  return p.outcome();
}

Outcome taste_correction() {
  Probe p;
  const auto t = csv::read(fixture("corrections.csv"));
  // Midpoints as published; JPN is known to disagree with its own bounds.
  const std::vector<std::pair<std::string, double>> printed{
      {"AUT", 0.69}, {"CHE", 1.17}, {"CUW", 1.02}, {"CZE", 9.75}, {"FRA", 0.64},
      {"GRC", 0.48}, {"JPN", 82.66}, {"KOR", 675.87}, {"TWN", 12.97}};
  std::size_t matched = 0;
  std::string flagged;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const std::string& id = t.rows[r][0];
    const double v = csv::to_double(t.rows[r][1], t, r, 1);
    const double lo = csv::to_double(t.rows[r][2], t, r, 2);
    const double hi = csv::to_double(t.rows[r][3], t, r, 3);
    const double c = taste_correct_value(v, lo, hi);
    const auto it = std::find_if(printed.begin(), printed.end(), [&](const auto& e) { return e.first == id; });
    if (it == printed.end()) continue;
    if (std::abs(c - it->second) <= 0.01 + 1e-12) {
      ++matched;
    } else {
      std::ostringstream s;
      s << id << " printed " << it->second << " vs midpoint " << c;
      flagged += (flagged.empty() ? "" : "; ") + s.str();
    }
  }
  p.expect(matched == 8, std::to_string(matched) + " of 9 rows match");
  p.expect(flagged.rfind("JPN", 0) == 0, "the Japan row should be the flagged discrepancy");
  return p.outcome("8/9 match; flagged: " + flagged);
}

Outcome nesting_suite() {
  Probe p;
  oracle::Generator gen(20170);
  std::size_t lp_checks = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const PooledDataset d = gen.rationalisable(gen.pick(2, 6), gen.pick(2, 5));
    if (!check_cewec(build_graph(d)).satisfied) {
      p.expect(false, "generator produced inconsistent data");
      continue;
    }
    for (BoundStyle style : {BoundStyle::Laspeyres, BoundStyle::Paasche}) {
      const BoundMatrix bm = bound_matrix(d, style);
      for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
          p.expect(rel_le(bm.classical_lower(i, j), bm.lower(i, j), 1e-7) &&
                       rel_le(bm.lower(i, j), bm.upper(i, j), 1e-7) &&
                       rel_le(bm.upper(i, j), bm.classical_upper(i, j), 1e-7),
                   "bound chain broken at rep " + std::to_string(rep));
        }
      }
    }
    const auto rel = reachability(build_graph(d));
    for (std::size_t b = 0; b < d.size(); ++b) {
      const auto sets = vrp_vrw(rel, b);
      oracle::Mat G;
      oracle::Vec g;
      for (std::size_t u : sets.vrw) {
        G.push_back(d[u].prices);
        g.push_back(d.expenditure(u));
      }
      for (std::size_t a = 0; a < d.size(); ++a) {
        const auto want = oracle::vertex_optimum(d[a].prices, G, g);
        const double got = m_minus(d, rel, b, d[a].prices).value;
        p.expect(want && std::abs(got - *want) <= 1e-7 * std::max(1.0, std::abs(*want)),
                 "LP disagrees with vertex enumeration at rep " + std::to_string(rep));
        ++lp_checks;
      }
    }
  }
  return p.outcome(std::to_string(lp_checks) + " LP values checked");
}

Outcome monotone_tightening() {
  Probe p;
  oracle::Generator gen(20171);
  std::size_t violations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const PooledDataset full = gen.rationalisable(gen.pick(3, 8), gen.pick(2, 5));
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (i == 0 || gen.pick(0, 2) != 0) keep.push_back(i);
    }
    if (keep.size() == full.size()) keep.pop_back();
    const PooledDataset part = full.subset(keep);
    const auto rel_full = reachability(build_graph(full));
    const auto rel_part = reachability(build_graph(part));
    for (std::size_t b = 0; b < keep.size(); ++b) {
      for (std::size_t a = 0; a < keep.size(); ++a) {
        const auto small = expenditure_bounds(part, rel_part, b, a);
        const auto big = expenditure_bounds(full, rel_full, keep[b], keep[a]);
        // Exact comparison up to LP round-off.
        if (big.m_minus < small.m_minus * (1.0 - 1e-12)) ++violations;
        if (big.m_plus > small.m_plus * (1.0 + 1e-12)) ++violations;
      }
    }
  }
  p.expect(violations == 0, std::to_string(violations) + " violations");
  return p.outcome();
}

Outcome transitivity_suite() {
  Probe p;
  oracle::Generator gen(20172);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = gen.pick(3, 8), k = gen.pick(2, 5);
    const PooledDataset d = gen.homothetic(n, k);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto tag = " at rep " + std::to_string(rep);
    p.expect(circularity_residual(geks(d).values) <= 1e-9, "GEKS circularity" + tag);
    p.expect(circularity_residual(ccd(d).values) <= 1e-9, "CCD circularity" + tag);
    p.expect(circularity_residual(geary_khamis(d).values) <= 1e-9, "GK circularity" + tag);
    p.expect(circularity_residual(market_rates(d).values) <= 1e-9, "market-rate circularity" + tag);
    p.expect(circularity_residual(gss_homothetic(d, all).index.values) <= 1e-9, "homothetic circularity" + tag);

    const PooledDataset two = gen.homothetic(2, k);
    const std::vector<std::size_t> both{0, 1};
    const double f = fisher(two).values(0, 1);
    p.near(geks(two).values(0, 1), f, 1e-12 * f, "GEKS = Fisher at N = 2" + tag);
    p.near(ccd(two).values(0, 1), tornqvist(two).values(0, 1), 1e-12 * f, "CCD = Tornqvist at N = 2" + tag);
    p.near(gss_homothetic(two, both).index.values(0, 1), f, 1e-12 * f, "homothetic = Fisher at N = 2" + tag);
  }
  return p.outcome();
}

Outcome cycle_oracle() {
  Probe p;
  oracle::Generator gen(20173);
  std::size_t violated = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = gen.pick(1, 7);
    const PooledDataset d = gen.pick(0, 2) == 0 ? gen.rationalisable(n, gen.pick(2, 4)) : gen.random(n, gen.pick(2, 4));
    const bool lib = check_cewec(build_graph(d)).satisfied;
    const bool bad = oracle::has_violating_cycle(oracle::weights(d));
    p.expect(lib == !bad, "disagreement at trial " + std::to_string(rep));
    violated += bad;
  }
  return p.outcome(std::to_string(violated) + "/500 violating");
}

Outcome gini_suite() {
  Probe p;
  oracle::Generator gen(20174);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = gen.pick(2, 50);
    const auto x = gen.vec(n, 0.0, 100.0);
    const auto w = gen.vec(n, 0.1, 50.0);
    p.near(gini(x, w), gini_pairwise(x, w), 1e-9, "trapezoid vs pairwise at rep " + std::to_string(rep));
    p.near(gini(x, w), oracle::gini_mean_difference(x, w), 1e-9, "trapezoid vs oracle");
  }
  const std::vector<double> x{0.0, 3.7}, w{1.0, 1.0};
  p.expect(gini(x, w) == 0.5, "two-country case should be exactly 0.5");
  return p.outcome();
}

Outcome full_data() {
  const char* dir = std::getenv("REFCON_ICP2017_DIR");
  if (!dir || !*dir) return {Verdict::Skip, "REFCON_ICP2017_DIR not set"};
  const std::filesystem::path root(dir);
  const auto aux = root / "aux.csv";
  const RawICPTable raw = ingest_icp(root / "ppp.csv", root / "expenditure.csv", "USA",
                                     std::filesystem::exists(aux) ? std::optional(aux) : std::nullopt);
  const PooledDataset data = convert(raw);
  const auto hub = max_reference_set(build_graph(data));
  const PooledDataset h = data.subset(hub);
  const auto usa = h.find("USA");
  const auto chn = h.find("CHN");
  if (!usa || !chn) return {Verdict::Fail, "USA or CHN outside the reference set"};
  const BoundMatrix bm = bound_matrix(h, BoundStyle::Laspeyres);
  const double classical = bm.classical_upper(*chn, *usa) - bm.classical_lower(*chn, *usa);
  const double multi = bm.upper(*chn, *usa) - bm.lower(*chn, *usa);
  Probe p;
  p.near(classical, 3.76, 0.005, "classical width");
  p.near(multi, 3.11, 0.005, "multilateral width");
  p.near(proportional_improvement(classical, multi), 0.173, 0.005, "proportional improvement");
  return p.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  // 0 = no time limit
  };
  const std::vector<Criterion> criteria{
      {1, "worked example indices and GEKS violation", worked_example, 1.0},
      {2, "edge weights and cycle-condition examples", cycle_examples, 1.0},
      {3, "star example extension", star_example, 0.0},
      {4, "taste-correction midpoints", taste_correction, 0.0},
      {5, "bound nesting and LP oracle", nesting_suite, 60.0},
      {6, "monotone tightening", monotone_tightening, 0.0},
      {7, "transitivity", transitivity_suite, 0.0},
      {8, "cycle-condition oracle", cycle_oracle, 0.0},
      {9, "Gini cross-check", gini_suite, 0.0},
      {10, "full-data bound widths", full_data, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.verdict == Verdict::Pass && c.limit_s > 0.0 && secs > c.limit_s) {
      o = {Verdict::Fail, "took longer than " + std::to_string(c.limit_s) + " s"};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    failures += o.verdict == Verdict::Fail;
    std::printf("%s %2d %s (%.3f s)%s%s\n", tag, c.id, c.name, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "refcon/aggregates.hpp"
#include "refcon/appraisal.hpp"
#include "refcon/bounds.hpp"
#include "refcon/csv.hpp"
#include "refcon/dataset.hpp"
#include "refcon/error.hpp"
#include "refcon/gss.hpp"
#include "refcon/indices.hpp"
#include "refcon/io.hpp"
#include "refcon/kernels.hpp"
#include "refcon/parallel.hpp"
#include "refcon/rpgraph.hpp"

namespace refcon::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string direct;
  std::string ppp;
  std::string expenditure;
  std::string aux;
  std::string base;
  std::string bound_style = "laspeyres";
  std::string segment = "all";
  std::string index = "geks";
  std::string gk_solver = "iterative";
  std::string triples;
  bool homothetic = false;
  bool exact_subset = false;
  unsigned threads = 0;
  std::string out;
  std::uint64_t seed = 0;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

BoundStyle parse_style(const std::string& s) {
  if (s == "laspeyres") return BoundStyle::Laspeyres;
  if (s == "paasche") return BoundStyle::Paasche;
  throw ConfigurationError("unknown bound style '" + s + "' (laspeyres or paasche)");
}

struct Loaded {
  PooledDataset data;
  ConversionReport report;
};

Loaded load(const RunConfig& c) {
  const bool icp = !c.ppp.empty() || !c.expenditure.empty();
  if (c.direct.empty() == !icp) {
    throw ConfigurationError("give either --direct or --ppp with --expenditure");
  }
  std::optional<std::string> base;
  if (!c.base.empty()) base = c.base;
  if (!c.direct.empty()) {
    if (!fs::exists(c.direct)) throw Error("cannot open " + c.direct);
    PooledDataset d = load_direct(c.direct, base);
    if (!c.aux.empty()) d = apply_aux(d, c.aux);
    return {std::move(d), {}};
  }
  if (c.ppp.empty() || c.expenditure.empty()) {
    throw ConfigurationError("--ppp and --expenditure must be given together");
  }
  std::optional<fs::path> aux;
  if (!c.aux.empty()) aux = c.aux;
  std::string b = c.base;
  if (b.empty()) {
    const csv::Table t = csv::read(c.ppp);
    if (t.rows.empty() || t.rows[0].size() < 2) throw EmptyDatasetError(c.ppp + " is empty");
    b = t.rows[0][1];
  }
  const RawICPTable raw = ingest_icp(c.ppp, c.expenditure, b, aux);
  Loaded l{convert(raw, nullptr), {}};
  convert(raw, &l.report);
  return l;
}

std::vector<std::string> names(const PooledDataset& d, std::span<const std::size_t> idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(d[i].id);
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

IndexMatrix restrict_to(const IndexMatrix& m, std::span<const std::size_t> idx) {
  IndexMatrix r;
  r.method = m.method;
  r.values = Matrix(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    r.ids.push_back(m.ids[idx[a]]);
    for (std::size_t b = 0; b < idx.size(); ++b) r.values(a, b) = m.values(idx[a], idx[b]);
  }
  return r;
}

std::vector<IndexMatrix> all_indices(const PooledDataset& d, const RunConfig& c,
                                     std::vector<std::string>* notes) {
  std::vector<IndexMatrix> out{fisher(d), geks(d), tornqvist(d), ccd(d)};
  const GkSolver solver = c.gk_solver == "direct" ? GkSolver::Direct : GkSolver::Iterative;
  out.push_back(geary_khamis_system(d, solver).index);
  const bool rates = std::all_of(d.observations().begin(), d.observations().end(),
                                 [](const auto& o) { return o.market_rate.has_value(); });
  if (rates) {
    out.push_back(market_rates(d));
  } else if (notes) {
    notes->push_back("market rates unavailable; market index skipped");
  }
  return out;
}

class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }
  void write(const std::string& name, const std::string& content) {
    if (!enabled()) return;
    io::write_file(fs::path(dir_) / name, content);
    files_[name] = hex(fnv1a(content));
  }
  const std::map<std::string, std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::map<std::string, std::string> files_;
};

void print_table(std::ostream& out, const GSSResult& r) {
  out << "country    ppp_vs_base      lower      upper  status\n";
  for (const auto& row : r.table) {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %12s %10s %10s  %s\n", row.country.c_str(),
                  io::fixed3(row.ppp_vs_base).c_str(), io::fixed3(row.lower).c_str(),
                  io::fixed3(row.upper).c_str(), to_string(row.status));
    out << line;
  }
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  out << "countries " << l.data.size() << ", headings " << l.data.goods() << ", base "
      << l.data.base_id() << "\n";
  if (!l.report.dropped_countries.empty()) {
    out << "dropped countries: " << join(l.report.dropped_countries) << "\n";
  }
  if (!l.report.dropped_headings.empty()) {
    out << "dropped headings: " << join(l.report.dropped_headings, "; ") << "\n";
  }
  Output o(c.out);
  std::string csv = "country";
  for (std::size_t k = 0; k < l.data.goods(); ++k) csv += ",p_" + std::to_string(k + 1);
  for (std::size_t k = 0; k < l.data.goods(); ++k) csv += ",q_" + std::to_string(k + 1);
  csv += "\n";
  for (const auto& obs : l.data.observations()) {
    csv += csv::escape(obs.id);
    for (double p : obs.prices) csv += "," + csv::format_number(p);
    for (double q : obs.quantities) csv += "," + csv::format_number(q);
    csv += "\n";
  }
  o.write("dataset.csv", csv);
  return kOk;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  const RPGraph g = build_graph(l.data);
  const ConsistencyResult r = c.homothetic ? check_harp(g) : check_cewec(g);
  out << (c.homothetic ? "HARP " : "CEWEC ") << (r.satisfied ? "SATISFIED" : "VIOLATED") << "\n";
  if (r.witness) {
    out << "cycle: " << io::cycle_to_string(g, *r.witness) << "\n";
    if (!c.homothetic) {
      out << "money pump index: " << csv::format_number(money_pump_index(g, *r.witness)) << "\n";
    } else {
      double prod = 1.0;
      for (double w : r.witness->edge_weights) prod *= w;
      out << "cycle weight product: " << csv::format_number(prod) << "\n";
    }
  }
  if (!r.violating_pairs.empty()) out << "violating pairs: " << r.violating_pairs.size() << "\n";
  Output o(c.out);
  o.write("graph_edges.csv", io::graph_edges_csv(g));
  o.write("graph.json", io::graph_adjacency_json(g));
  return r.satisfied ? kOk : kViolation;
}

std::vector<std::size_t> reference_set(const PooledDataset& d, const RunConfig& c) {
  if (c.homothetic) return greedy_homothetic_refset(d).members;
  return max_reference_set(build_graph(d), c.exact_subset);
}

int cmd_refset(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  const auto set = reference_set(l.data, c);
  out << "reference set (" << set.size() << " of " << l.data.size() << "): "
      << join(names(l.data, set)) << "\n";
  std::string csv = "country,in_refset\n";
  for (std::size_t i = 0; i < l.data.size(); ++i) {
    const bool in = std::find(set.begin(), set.end(), i) != set.end();
    csv += csv::escape(l.data[i].id) + (in ? ",1\n" : ",0\n");
  }
  Output o(c.out);
  o.write("refset.csv", csv);
  return kOk;
}

std::string improvement_csv(const BoundMatrix& bm, const ImprovementStats& s) {
  std::string csv = "i,j,classical_width,multilateral_width,improvement\n";
  for (const auto& p : s.pairs) {
    csv += csv::escape(bm.ids[p.i]) + "," + csv::escape(bm.ids[p.j]) + "," +
           csv::format_number(p.classical_width) + "," +
           csv::format_number(p.multilateral_width) + "," + csv::format_number(p.improvement) +
           "\n";
  }
  return csv;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  const auto hub = max_reference_set(build_graph(l.data), c.exact_subset);
  const PooledDataset sub = l.data.subset(hub);
  const BoundStyle style = parse_style(c.bound_style);
  const BoundMatrix bm = bound_matrix(sub, style);
  const ImprovementStats s = bound_improvement_stats(bm);
  out << to_string(style) << "-style bounds over " << sub.size() << " countries\n";
  out << "i        j          cl_lower    lower    upper  cl_upper\n";
  for (std::size_t i = 0; i < bm.size(); ++i) {
    for (std::size_t j = 0; j < bm.size(); ++j) {
      if (i == j) continue;
      char line[160];
      std::snprintf(line, sizeof line, "%-8s %-8s %10s %8s %8s %9s\n", bm.ids[i].c_str(),
                    bm.ids[j].c_str(), io::fixed3(bm.classical_lower(i, j)).c_str(),
                    io::fixed3(bm.lower(i, j)).c_str(), io::fixed3(bm.upper(i, j)).c_str(),
                    io::fixed3(bm.classical_upper(i, j)).c_str());
      out << line;
    }
  }
  out << "mean width improvement: " << io::fixed3(s.mean) << "\n";
  Output o(c.out);
  o.write("bounds.csv", io::bounds_csv(bm));
  o.write("bounds.json", io::bounds_json(bm));
  o.write("improvement.csv", improvement_csv(bm, s));
  return kOk;
}

int cmd_indices(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  std::vector<std::string> notes;
  const auto ms = all_indices(l.data, c, &notes);
  for (const auto& n : notes) out << "note: " << n << "\n";
  out << "country";
  for (const auto& m : ms) out << "  " << to_string(m.method);
  out << "   (vs " << l.data.base_id() << ")\n";
  for (std::size_t i = 0; i < l.data.size(); ++i) {
    out << l.data[i].id;
    for (const auto& m : ms) out << "  " << io::fixed3(m.values(i, l.data.base()));
    out << "\n";
  }
  Output o(c.out);
  std::string all;
  for (const auto& m : ms) {
    const std::string csv = io::index_csv(m);
    all += all.empty() ? csv : csv.substr(csv.find('\n') + 1);
  }
  o.write("indices.csv", all);
  o.write("indices_vs_base.csv", io::relative_to_base_csv(ms, l.data.base()));
  return kOk;
}

struct Appraised {
  std::vector<AppraisalReport> reports;
  std::vector<ComparisonRow> comparisons;
  std::vector<std::string> ids;
};

Appraised appraise_all(const PooledDataset& d, const RunConfig& c, const GSSResult& gss,
                       const std::vector<IndexMatrix>& ms) {
  const auto seg = parse_segment(c.segment);
  if (!seg) throw ConfigurationError("unknown segment '" + c.segment + "' (all, in-rc, out-rc)");
  Appraised a;
  std::vector<IndexMatrix> with_gss = ms;
  with_gss.push_back(gss.index);
  if (parse_style(c.bound_style) == BoundStyle::Laspeyres) {
    a.ids = gss.bounds.ids;
    for (const auto& m : with_gss) a.reports.push_back(appraise(m, gss.bounds, *seg, gss.in_hub));
  } else {
    const BoundMatrix bm = bound_matrix(d.subset(gss.hub), BoundStyle::Paasche);
    a.ids = bm.ids;
    for (const auto& m : with_gss) {
      a.reports.push_back(appraise(restrict_to(m, gss.hub), bm, *seg));
    }
  }
  a.comparisons = comparison_table(a.reports);
  return a;
}

int cmd_appraise(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  const GSSResult gss = gss_full(l.data, {c.exact_subset});
  const auto ms = all_indices(l.data, c, nullptr);
  const Appraised a = appraise_all(l.data, c, gss, ms);
  out << io::appraisal_table_text(a.reports, a.comparisons);
  Output o(c.out);
  for (const auto& r : a.reports) {
    o.write(std::string("appraisal_") + to_string(r.method) + ".csv", io::appraisal_csv(r, a.ids));
  }
  o.write("appraisal.json", io::appraisal_json(a.reports));
  o.write("appraisal_table.txt", io::appraisal_table_text(a.reports, a.comparisons));
  return kOk;
}

int cmd_gss(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  Output o(c.out);
  if (c.homothetic) {
    const HomotheticCandidate cand = greedy_homothetic_refset(l.data);
    const HomotheticResult h = gss_homothetic(l.data, cand.members);
    out << "homothetic hub: " << join(names(l.data, cand.members)) << "\n";
    const auto it = std::find(cand.members.begin(), cand.members.end(), l.data.base());
    const std::size_t anchor = it != cand.members.end()
                                   ? static_cast<std::size_t>(it - cand.members.begin())
                                   : 0;
    std::string csv = "country,ppp_vs_base,lower,upper,in_hub\n";
    for (std::size_t a = 0; a < cand.members.size(); ++a) {
      out << h.index.ids[a] << "  " << io::fixed3(h.index.values(a, anchor)) << "  ["
          << io::fixed3(h.lower(a, anchor)) << ", " << io::fixed3(h.upper(a, anchor)) << "]\n";
      csv += csv::escape(h.index.ids[a]) + "," + csv::format_number(h.index.values(a, anchor)) +
             "," + csv::format_number(h.lower(a, anchor)) + "," +
             csv::format_number(h.upper(a, anchor)) + ",1\n";
    }
    o.write("gss_homothetic_table.csv", csv);
    return kOk;
  }
  const GSSResult r = gss_full(l.data, {c.exact_subset});
  std::vector<std::string> ids;
  for (const auto& obs : l.data.observations()) ids.push_back(obs.id);
  out << "hub: " << join(names(l.data, r.hub)) << "\n";
  print_table(out, r);
  o.write("gss_table.csv", io::gss_table_csv(r));
  o.write("gss_forecasts.csv", io::gss_forecasts_csv(r, ids));
  o.write("gss_bounds.csv", io::bounds_csv(r.bounds));
  return kOk;
}

IndexMatrix chosen_index(const PooledDataset& d, const RunConfig& c, const GSSResult* gss) {
  const auto m = parse_index_method(c.index);
  if (!m) throw ConfigurationError("unknown index '" + c.index + "'");
  switch (*m) {
    case IndexMethod::Fisher: return fisher(d);
    case IndexMethod::Geks: return geks(d);
    case IndexMethod::Tornqvist: return tornqvist(d);
    case IndexMethod::Ccd: return ccd(d);
    case IndexMethod::GearyKhamis: return geary_khamis(d);
    case IndexMethod::MarketRate: return market_rates(d);
    case IndexMethod::Gss: return gss ? gss->index : gss_full(d, {c.exact_subset}).index;
    case IndexMethod::Homothetic: break;
  }
  throw ConfigurationError("index '" + c.index + "' is not available here");
}

int cmd_aggregate(const RunConfig& c, std::ostream& out) {
  const Loaded l = load(c);
  const IndexMatrix m = chosen_index(l.data, c, nullptr);
  const WorldOutput w = world_output(l.data, m, l.data.base());
  const LorenzCurve curve = lorenz(w.per_capita, w.population, w.ids);
  const double g = gini_from_curve(curve);
  out << "index " << to_string(m.method) << ": world output " << csv::format_number(w.total)
      << ", gini " << io::fixed3(g) << "\n";
  Output o(c.out);
  o.write("aggregates.json", io::aggregates_json(w, g));
  o.write("lorenz.csv", io::lorenz_csv(curve));
  return kOk;
}

int cmd_correct(const RunConfig& c, std::ostream& out) {
  Output o(c.out);
  if (!c.triples.empty()) {
    // country,value,lower,upper
    const csv::Table t = csv::read(c.triples);
    std::string csv = "country,value,lower,upper,corrected\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      if (r == 0 && !row.empty() && row[0] == "country") continue;
      if (row.size() != 4) throw ParseError(t.source, r + 1, row.size(), "expected country,value,lower,upper");
      const double v = csv::to_double(row[1], t, r, 1);
      const double lo = csv::to_double(row[2], t, r, 2);
      const double hi = csv::to_double(row[3], t, r, 3);
      const double corr = taste_correct_value(v, lo, hi);
      out << row[0] << "  " << io::fixed3(v) << " -> " << io::fixed3(corr) << "\n";
      csv += csv::escape(row[0]) + "," + csv::format_number(v) + "," + csv::format_number(lo) +
             "," + csv::format_number(hi) + "," + csv::format_number(corr) + "\n";
    }
    o.write("corrected_triples.csv", csv);
    return kOk;
  }
  const Loaded l = load(c);
  const GSSResult gss = gss_full(l.data, {c.exact_subset});
  const IndexMatrix m = chosen_index(l.data, c, &gss);
  const CorrectedIndex ci = taste_correct(m, gss.bounds);
  out << ci.log.size() << " entries corrected\n";
  for (const auto& e : ci.log) {
    out << ci.index.ids[e.i] << "/" << ci.index.ids[e.j] << "  " << io::fixed3(e.original)
        << " -> " << io::fixed3(e.corrected) << "\n";
  }
  o.write(std::string("corrected_") + to_string(m.method) + ".csv", io::index_csv(ci.index));
  o.write(std::string("corrections_") + to_string(m.method) + ".csv", io::corrections_csv(ci));
  return kOk;
}

int cmd_pipeline(const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) throw ConfigurationError("pipeline needs --out");
  const Loaded l = load(c);
  const PooledDataset& d = l.data;
  Output o(c.out);
  json failures = json::array();
  json notes = json::array();
  for (const auto& s : l.report.dropped_countries) notes.push_back("dropped country " + s);
  for (const auto& s : l.report.dropped_headings) notes.push_back("dropped heading " + s);

  const RPGraph g = build_graph(d);
  const ConsistencyResult cewec = check_cewec(g);
  o.write("graph_edges.csv", io::graph_edges_csv(g));

  const GSSResult gss = gss_full(d, {c.exact_subset});
  std::string refset = "country,in_refset\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    refset += csv::escape(d[i].id) + (gss.in_hub[i] ? ",1\n" : ",0\n");
  }
  o.write("refset.csv", refset);

  const PooledDataset hub = d.subset(gss.hub);
  for (auto style : {BoundStyle::Laspeyres, BoundStyle::Paasche}) {
    const BoundMatrix bm = bound_matrix(hub, style);
    const std::string tag = to_string(style);
    o.write("bounds_" + tag + ".csv", io::bounds_csv(bm));
    o.write("bounds_" + tag + ".json", io::bounds_json(bm));
    o.write("improvement_" + tag + ".csv", improvement_csv(bm, bound_improvement_stats(bm)));
  }

  std::vector<std::string> index_notes;
  const auto ms = all_indices(d, c, &index_notes);
  for (const auto& n : index_notes) notes.push_back(n);
  std::string all;
  for (const auto& m : ms) {
    const std::string csv = io::index_csv(m);
    all += all.empty() ? csv : csv.substr(csv.find('\n') + 1);
  }
  std::vector<IndexMatrix> with_gss = ms;
  with_gss.push_back(gss.index);
  o.write("indices.csv", all);
  o.write("indices_vs_base.csv", io::relative_to_base_csv(with_gss, d.base()));

  const Appraised a = appraise_all(d, c, gss, ms);
  for (const auto& r : a.reports) {
    o.write(std::string("appraisal_") + to_string(r.method) + ".csv", io::appraisal_csv(r, a.ids));
  }
  o.write("appraisal.json", io::appraisal_json(a.reports));
  o.write("appraisal_table.txt", io::appraisal_table_text(a.reports, a.comparisons));
  std::string comp = "comparison,rate_delta,magnitude_delta\n";
  for (const auto& row : a.comparisons) {
    comp += csv::escape(row.label) + "," +
            (row.rate_delta ? csv::format_number(*row.rate_delta) : "NA") + "," +
            (row.magnitude_delta ? csv::format_number(*row.magnitude_delta) : "NA") + "\n";
  }
  o.write("comparison.csv", comp);

  std::vector<std::string> ids;
  for (const auto& obs : d.observations()) ids.push_back(obs.id);
  o.write("gss_table.csv", io::gss_table_csv(gss));
  o.write("gss_forecasts.csv", io::gss_forecasts_csv(gss, ids));
  o.write("gss_bounds.csv", io::bounds_csv(gss.bounds));

  const CorrectedIndex ci = taste_correct(geks(d), gss.bounds);
  o.write("corrected_geks.csv", io::index_csv(ci.index));
  o.write("corrections_geks.csv", io::corrections_csv(ci));

  try {
    const WorldOutput w = world_output(d, gss.index, d.base());
    const LorenzCurve curve = lorenz(w.per_capita, w.population, w.ids);
    o.write("aggregates.json", io::aggregates_json(w, gini_from_curve(curve)));
    o.write("lorenz.csv", io::lorenz_csv(curve));
  } catch (const ConfigurationError& e) {
    notes.push_back(std::string("aggregates skipped: ") + e.what());
  }

  json config{{"base", d.base_id()},
              {"bound_style", c.bound_style},
              {"segment", c.segment},
              {"homothetic", c.homothetic},
              {"exact_subset", c.exact_subset},
              {"gk_solver", c.gk_solver},
              {"seed", c.seed}};
  json inputs = json::object();
  for (const auto& p : {c.direct, c.ppp, c.expenditure, c.aux}) {
    if (!p.empty()) inputs[fs::path(p).filename().string()] = hex(fnv1a(slurp(p)));
  }
  json outputs = json::object();
  std::uint64_t result_hash = fnv1a(config.dump());
  for (const auto& [name, h] : inputs.items()) result_hash = fnv1a(name + h.get<std::string>(), result_hash);
  for (const auto& [name, h] : o.files()) {
    outputs[name] = h;
    result_hash = fnv1a(name + h, result_hash);
  }
  json manifest{{"tool", "refcon"},
                {"version", kVersion},
                {"config", config},
                {"inputs", inputs},
                {"outputs", outputs},
                {"cewec", cewec.satisfied ? "SATISFIED" : "VIOLATED"},
                {"hub", names(d, gss.hub)},
                {"notes", notes},
                {"failures", failures},
                {"result_hash", hex(result_hash)}};
  o.write("manifest.json", manifest.dump(2) + "\n");
  out << "hub: " << join(names(d, gss.hub)) << "\n";
  print_table(out, gss);
  out << "wrote " << o.files().size() << " files to " << c.out << "\n";
  return kOk;
}

void add_input_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--direct", c.direct, "CSV of country,p_1..p_K,q_1..q_K")->envname("REFCON_DIRECT");
  sub->add_option("--ppp", c.ppp, "basic-heading PPP table")->envname("REFCON_PPP");
  sub->add_option("--expenditure", c.expenditure, "basic-heading expenditure table")
      ->envname("REFCON_EXPENDITURE");
  sub->add_option("--aux", c.aux, "CSV of country,population,market_rate")->envname("REFCON_AUX");
  sub->add_option("--base", c.base, "base country id")->envname("REFCON_BASE");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)")->envname("REFCON_THREADS");
  sub->add_option("--out", c.out, "output directory")->envname("REFCON_OUT");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-consumer price comparisons"};
  app.name(args.empty() ? "refcon" : fs::path(args[0]).filename().string());
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig c;

  auto style_opt = [&](CLI::App* s) {
    s->add_option("--bound-style", c.bound_style, "laspeyres (utility of the second country in each pair) or paasche (of the first)")
        ->envname("REFCON_BOUND_STYLE");
  };
  auto exact_opt = [&](CLI::App* s) {
    s->add_flag("--exact-subset", c.exact_subset, "exhaustive reference-set search (n <= 15)")
        ->envname("REFCON_EXACT_SUBSET");
  };
  auto homothetic_opt = [&](CLI::App* s) {
    s->add_flag("--homothetic", c.homothetic, "use the homothetic condition")
        ->envname("REFCON_HOMOTHETIC");
  };
  auto segment_opt = [&](CLI::App* s) {
    s->add_option("--segment", c.segment, "all, in-rc or out-rc")->envname("REFCON_SEGMENT");
  };
  auto index_opt = [&](CLI::App* s) {
    s->add_option("--index", c.index, "fisher, geks, tornqvist, ccd, gk, market or gss")
        ->envname("REFCON_INDEX");
  };
  auto gk_opt = [&](CLI::App* s) {
    s->add_option("--gk-solver", c.gk_solver, "iterative or direct")
        ->check(CLI::IsMember({"iterative", "direct"}))
        ->envname("REFCON_GK_SOLVER");
  };

  auto* ingest = app.add_subcommand("ingest", "load and convert input data");
  auto* check = app.add_subcommand("check", "test for a reference consumer");
  auto* refset = app.add_subcommand("refset", "largest consistent country set");
  auto* bounds = app.add_subcommand("bounds", "cost-of-living bounds on the reference set");
  auto* indices = app.add_subcommand("indices", "multilateral price indices");
  auto* appraise = app.add_subcommand("appraise", "score indices against the bounds");
  auto* gss = app.add_subcommand("gss", "generalised star system index");
  auto* aggregate = app.add_subcommand("aggregate", "world output and Gini");
  auto* correct = app.add_subcommand("correct", "taste-correct an index");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage and write all outputs");

  for (auto* s : {ingest, check, refset, bounds, indices, appraise, gss, aggregate, correct, pipeline}) {
    add_input_options(s, c);
  }
  homothetic_opt(check);
  for (auto* s : {refset, bounds, appraise, gss, correct, aggregate, pipeline}) exact_opt(s);
  homothetic_opt(refset);
  homothetic_opt(gss);
  homothetic_opt(pipeline);
  style_opt(bounds);
  style_opt(appraise);
  style_opt(pipeline);
  segment_opt(appraise);
  segment_opt(pipeline);
  index_opt(correct);
  index_opt(aggregate);
  for (auto* s : {indices, appraise, pipeline}) gk_opt(s);
  correct->add_option("--triples", c.triples, "CSV of country,value,lower,upper to correct directly")
      ->envname("REFCON_TRIPLES");
  pipeline->add_option("--seed", c.seed, "seed recorded in the manifest")->envname("REFCON_SEED");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  set_default_threads(c.threads);
  try {
    if (*ingest) return cmd_ingest(c, out);
    if (*check) return cmd_check(c, out);
    if (*refset) return cmd_refset(c, out);
    if (*bounds) return cmd_bounds(c, out);
    if (*indices) return cmd_indices(c, out);
    if (*appraise) return cmd_appraise(c, out);
    if (*gss) return cmd_gss(c, out);
    if (*aggregate) return cmd_aggregate(c, out);
    if (*correct) return cmd_correct(c, out);
    if (*pipeline) return cmd_pipeline(c, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const InconsistentDataError& e) {
    err << "error: " << e.what() << "\n";
    return kViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace refcon::cli

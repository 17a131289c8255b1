#include "refcon/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include "json.hpp"
#include <sstream>

#include "refcon/csv.hpp"
#include "refcon/error.hpp"

namespace refcon::io {
namespace {

using nlohmann::json;
using csv::escape;
using csv::format_number;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_cell(const csv::Table& t, std::size_t r, std::size_t c) {
  const std::string& s = t.rows[r][c];
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (csv::is_missing(s)) return std::numeric_limits<double>::quiet_NaN();
  return csv::to_double(s, t, r, c);
}

csv::Table parse_with_header(std::string_view text, std::string_view header) {
  csv::Table t = csv::parse(text, "<output>");
  std::string got;
  if (!t.rows.empty()) {
    for (std::size_t c = 0; c < t.rows[0].size(); ++c) got += (c ? "," : "") + t.rows[0][c];
  }
  if (got.rfind(header, 0) != 0) {
    throw ParseError(t.source, 1, 1, "expected header '" + std::string(header) + "'");
  }
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.rows[0].size()) {
      throw ParseError(t.source, r + 1, t.rows[r].size(), "wrong number of cells");
    }
  }
  return t;
}

std::size_t id_index(std::map<std::string, std::size_t>& ids, std::vector<std::string>& order,
                     const std::string& id) {
  const auto [it, inserted] = ids.emplace(id, order.size());
  if (inserted) order.push_back(id);
  return it->second;
}

std::size_t lookup(std::span<const std::string> ids, const std::string& id) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  throw ParseError("<output>", 0, 0, "unknown country '" + id + "'");
}

}  // namespace

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::string fixed3(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string graph_edges_csv(const RPGraph& g) {
  std::string out = "from,to,weight\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (i == j) continue;
      out += escape(g.ids[i]) + "," + escape(g.ids[j]) + "," + format_number(g.weights(i, j)) + "\n";
    }
  }
  return out;
}

std::string graph_adjacency_json(const RPGraph& g) {
  json j;
  j["countries"] = g.ids;
  json w = json::array();
  for (std::size_t r = 0; r < g.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < g.size(); ++c) row.push_back(g.weights(r, c));
    w.push_back(std::move(row));
  }
  j["weights"] = std::move(w);
  return j.dump(2) + "\n";
}

std::string cycle_to_string(const RPGraph& g, const ViolationCycle& c) {
  std::string out;
  for (std::size_t l = 0; l < c.vertices.size(); ++l) {
    out += g.ids[c.vertices[l]] + " -(" + fixed3(c.edge_weights[l]) + ")-> ";
  }
  if (!c.vertices.empty()) out += g.ids[c.vertices.front()];
  return out;
}

std::string index_csv(const IndexMatrix& m) {
  std::string out = "method,i,j,value\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += std::string(to_string(m.method)) + "," + escape(m.ids[i]) + "," + escape(m.ids[j]) +
             "," + format_number(m.values(i, j)) + "\n";
    }
  }
  return out;
}

IndexMatrix read_index_csv(std::string_view text) {
  const csv::Table t = parse_with_header(text, "method,i,j,value");
  std::map<std::string, std::size_t> ids;
  IndexMatrix m;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    id_index(ids, m.ids, t.rows[r][1]);
    id_index(ids, m.ids, t.rows[r][2]);
  }
  m.values = Matrix::identity(m.ids.size());
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const auto method = parse_index_method(t.rows[r][0]);
    if (!method) throw ParseError(t.source, r + 1, 1, "unknown method '" + t.rows[r][0] + "'");
    m.method = *method;
    m.values(ids.at(t.rows[r][1]), ids.at(t.rows[r][2])) = read_cell(t, r, 3);
  }
  return m;
}

std::string index_json(const IndexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      rows.push_back({{"i", m.ids[i]}, {"j", m.ids[j]}, {"value", number(m.values(i, j))}});
    }
  }
  return json{{"method", to_string(m.method)}, {"values", rows}}.dump(2) + "\n";
}

std::string relative_to_base_csv(std::span<const IndexMatrix> ms, std::size_t base) {
  if (ms.empty()) return "country\n";
  std::string out = "country";
  for (const auto& m : ms) out += std::string(",") + to_string(m.method);
  out += "\n";
  for (std::size_t i = 0; i < ms.front().size(); ++i) {
    out += escape(ms.front().ids[i]);
    for (const auto& m : ms) out += "," + format_number(m.values(i, base));
    out += "\n";
  }
  return out;
}

std::string bounds_csv(const BoundMatrix& bm) {
  std::string out = "base,at,classical_lower,lower,upper,classical_upper\n";
  for (std::size_t i = 0; i < bm.size(); ++i) {
    for (std::size_t j = 0; j < bm.size(); ++j) {
      const std::size_t b = bm.indifference_base(i, j);
      const std::size_t at = b == j ? i : j;
      out += escape(bm.ids[b]) + "," + escape(bm.ids[at]) + "," +
             format_number(bm.classical_lower(i, j)) + "," + format_number(bm.lower(i, j)) + "," +
             format_number(bm.upper(i, j)) + "," + format_number(bm.classical_upper(i, j)) + "\n";
    }
  }
  return out;
}

BoundMatrix read_bounds_csv(std::string_view text, BoundStyle kind) {
  const csv::Table t = parse_with_header(text, "base,at,classical_lower,lower,upper,classical_upper");
  BoundMatrix bm;
  bm.kind = kind;
  std::map<std::string, std::size_t> ids;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    id_index(ids, bm.ids, t.rows[r][0]);
    id_index(ids, bm.ids, t.rows[r][1]);
  }
  const std::size_t n = bm.ids.size();
  bm.lower = Matrix::identity(n);
  bm.upper = Matrix::identity(n);
  bm.classical_lower = Matrix::identity(n);
  bm.classical_upper = Matrix::identity(n);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const std::size_t b = ids.at(t.rows[r][0]);
    const std::size_t at = ids.at(t.rows[r][1]);
    const std::size_t i = kind == BoundStyle::Laspeyres ? at : b;
    const std::size_t j = kind == BoundStyle::Laspeyres ? b : at;
    bm.classical_lower(i, j) = read_cell(t, r, 2);
    bm.lower(i, j) = read_cell(t, r, 3);
    bm.upper(i, j) = read_cell(t, r, 4);
    bm.classical_upper(i, j) = read_cell(t, r, 5);
  }
  return bm;
}

std::string bounds_json(const BoundMatrix& bm) {
  auto mat = [&](const Matrix& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
      a.push_back(std::move(row));
    }
    return a;
  };
  json j{{"style", to_string(bm.kind)},
         {"countries", bm.ids},
         {"lower", mat(bm.lower)},
         {"upper", mat(bm.upper)},
         {"classical_lower", mat(bm.classical_lower)},
         {"classical_upper", mat(bm.classical_upper)}};
  return j.dump(2) + "\n";
}

std::string appraisal_csv(const AppraisalReport& r, std::span<const std::string> ids) {
  std::string out = "i,j,value,lower,upper,side,overshoot\n";
  for (const auto& p : r.per_pair) {
    out += escape(ids[p.i]) + "," + escape(ids[p.j]) + "," + format_number(p.value) + "," +
           format_number(p.lower) + "," + format_number(p.upper) + "," + to_string(p.side) + "," +
           format_number(p.overshoot) + "\n";
  }
  return out;
}

std::vector<PairRecord> read_appraisal_csv(std::string_view text,
                                           std::span<const std::string> ids) {
  const csv::Table t = parse_with_header(text, "i,j,value,lower,upper,side,overshoot");
  std::vector<PairRecord> out;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    PairRecord p;
    p.i = lookup(ids, t.rows[r][0]);
    p.j = lookup(ids, t.rows[r][1]);
    p.value = read_cell(t, r, 2);
    p.lower = read_cell(t, r, 3);
    p.upper = read_cell(t, r, 4);
    const std::string& side = t.rows[r][5];
    if (side == "none") p.side = Side::None;
    else if (side == "lower") p.side = Side::Lower;
    else if (side == "upper") p.side = Side::Upper;
    else throw ParseError(t.source, r + 1, 6, "unknown side '" + side + "'");
    p.overshoot = read_cell(t, r, 6);
    out.push_back(p);
  }
  return out;
}

std::string appraisal_json(std::span<const AppraisalReport> reports) {
  json a = json::array();
  for (const auto& r : reports) {
    a.push_back({{"method", to_string(r.method)},
                 {"segment", to_string(r.segment)},
                 {"pairs", r.pairs},
                 {"upper_violations", r.upper_violations},
                 {"lower_violations", r.lower_violations},
                 {"error_rate", r.error_rate},
                 {"error_magnitude", r.error_magnitude}});
  }
  return a.dump(2) + "\n";
}

std::string appraisal_table_text(std::span<const AppraisalReport> reports,
                                 std::span<const ComparisonRow> comparisons) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-8s %10s %10s %8s %8s\n", "index", "segment", "rate(%)",
                "mag(%)", "upper", "lower");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-12s %-8s %10s %10s %8zu %8zu\n", to_string(r.method),
                  to_string(r.segment), fixed3(100.0 * r.error_rate).c_str(),
                  fixed3(100.0 * r.error_magnitude).c_str(), r.upper_violations,
                  r.lower_violations);
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof line, "%-20s %10s %10s\n", "comparison", "d_rate(%)", "d_mag(%)");
  out << line;
  for (const auto& c : comparisons) {
    std::snprintf(line, sizeof line, "%-20s %10s %10s\n", c.label.c_str(),
                  c.rate_delta ? fixed3(100.0 * *c.rate_delta).c_str() : "absent",
                  c.magnitude_delta ? fixed3(100.0 * *c.magnitude_delta).c_str() : "absent");
    out << line;
  }
  return out.str();
}

std::string corrections_csv(const CorrectedIndex& c) {
  std::string out = "i,j,original,lower,upper,corrected\n";
  for (const auto& e : c.log) {
    out += escape(c.index.ids[e.i]) + "," + escape(c.index.ids[e.j]) + "," +
           format_number(e.original) + "," + format_number(e.lower) + "," +
           format_number(e.upper) + "," + format_number(e.corrected) + "\n";
  }
  return out;
}

std::string gss_table_csv(const GSSResult& r) {
  std::string out = "country,ppp_vs_base,lower,upper,in_hub\n";
  for (const auto& row : r.table) {
    out += escape(row.country) + "," + format_number(row.ppp_vs_base) + "," +
           format_number(row.lower) + "," + format_number(row.upper) + "," +
           (row.in_hub ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<GssTableRow> read_gss_table_csv(std::string_view text) {
  const csv::Table t = parse_with_header(text, "country,ppp_vs_base,lower,upper,in_hub");
  std::vector<GssTableRow> out;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    GssTableRow row;
    row.country = t.rows[r][0];
    row.ppp_vs_base = read_cell(t, r, 1);
    row.lower = read_cell(t, r, 2);
    row.upper = read_cell(t, r, 3);
    if (t.rows[r][4] != "0" && t.rows[r][4] != "1") {
      throw ParseError(t.source, r + 1, 5, "in_hub must be 0 or 1");
    }
    row.in_hub = t.rows[r][4] == "1";
    row.status = row.in_hub ? ExtensionStatus::Hub : ExtensionStatus::Extended;
    out.push_back(std::move(row));
  }
  return out;
}

std::string gss_forecasts_csv(const GSSResult& r, std::span<const std::string> ids) {
  std::size_t K = 0;
  for (const auto& rec : r.outside) K = std::max(K, rec.result.forecast.size());
  std::string out = "country,status,accumulated,lower,upper,value,vrw";
  for (std::size_t k = 0; k < K; ++k) out += ",q_" + std::to_string(k + 1);
  out += "\n";
  for (const auto& rec : r.outside) {
    std::string vrw;
    for (std::size_t v : rec.result.vrw) vrw += (vrw.empty() ? "" : " ") + ids[v];
    out += escape(ids[rec.country]) + "," + to_string(rec.result.status) + "," +
           (rec.accumulated ? "1" : "0") + "," + format_number(rec.result.lower) + "," +
           format_number(rec.result.upper) + "," + format_number(rec.result.value) + "," +
           escape(vrw);
    for (std::size_t k = 0; k < K; ++k) {
      out += "," + (k < rec.result.forecast.size() ? format_number(rec.result.forecast[k]) : "NA");
    }
    out += "\n";
  }
  return out;
}

std::string lorenz_csv(const LorenzCurve& c) {
  std::string out = "population_share,value_share\n";
  for (const auto& [x, y] : c.points) out += format_number(x) + "," + format_number(y) + "\n";
  return out;
}

LorenzCurve read_lorenz_csv(std::string_view text) {
  const csv::Table t = parse_with_header(text, "population_share,value_share");
  LorenzCurve c;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    c.points.emplace_back(read_cell(t, r, 0), read_cell(t, r, 1));
  }
  return c;
}

std::string aggregates_json(const WorldOutput& w, double gini) {
  json countries = json::array();
  for (std::size_t i = 0; i < w.ids.size(); ++i) {
    countries.push_back({{"country", w.ids[i]},
                         {"population", w.population[i]},
                         {"per_capita", w.per_capita[i]},
                         {"real_expenditure", w.real_expenditure[i]}});
  }
  return json{{"total_output", w.total}, {"gini", gini}, {"countries", countries}}.dump(2) + "\n";
}

}  // namespace refcon::io

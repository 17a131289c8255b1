#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refcon/aggregates.hpp"
#include "refcon/appraisal.hpp"
#include "refcon/bounds.hpp"
#include "refcon/gss.hpp"
#include "refcon/indices.hpp"
#include "refcon/rpgraph.hpp"

// Text renderings of every result type. CSV numbers use 12 significant
// digits; NaN and infinity are written as NA and inf. Each CSV writer has a
// matching reader.
namespace refcon::io {

void write_file(const std::filesystem::path& path, std::string_view content);

// from,to,weight
std::string graph_edges_csv(const RPGraph& g);
std::string graph_adjacency_json(const RPGraph& g);
std::string cycle_to_string(const RPGraph& g, const ViolationCycle& c);

// method,i,j,value
std::string index_csv(const IndexMatrix& m);
IndexMatrix read_index_csv(std::string_view text);
std::string index_json(const IndexMatrix& m);
// country,<method>... with values(i, base) per method
std::string relative_to_base_csv(std::span<const IndexMatrix> ms, std::size_t base);

// base,at,classical_lower,lower,upper,classical_upper, one row per ordered
// pair. `base` is the indifference base of the entry.
std::string bounds_csv(const BoundMatrix& bm);
BoundMatrix read_bounds_csv(std::string_view text, BoundStyle kind);
std::string bounds_json(const BoundMatrix& bm);

// i,j,value,lower,upper,side,overshoot
std::string appraisal_csv(const AppraisalReport& r, std::span<const std::string> ids);
std::vector<PairRecord> read_appraisal_csv(std::string_view text,
                                           std::span<const std::string> ids);
std::string appraisal_json(std::span<const AppraisalReport> reports);
// Rates and magnitudes in percent, 3 decimals.
std::string appraisal_table_text(std::span<const AppraisalReport> reports,
                                 std::span<const ComparisonRow> comparisons);

// i,j,original,lower,upper,corrected
std::string corrections_csv(const CorrectedIndex& c);

// country,ppp_vs_base,lower,upper,in_hub
std::string gss_table_csv(const GSSResult& r);
std::vector<GssTableRow> read_gss_table_csv(std::string_view text);
// country,status,accumulated,lower,upper,value,vrw,q_1..q_K
std::string gss_forecasts_csv(const GSSResult& r, std::span<const std::string> ids);

// population_share,value_share
std::string lorenz_csv(const LorenzCurve& c);
LorenzCurve read_lorenz_csv(std::string_view text);
std::string aggregates_json(const WorldOutput& w, double gini);

// Display formatting at 3 decimals.
std::string fixed3(double v);

}  // namespace refcon::io

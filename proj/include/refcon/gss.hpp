#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refcon/bounds.hpp"
#include "refcon/dataset.hpp"
#include "refcon/indices.hpp"
#include "refcon/lp.hpp"

namespace refcon {

// Entrywise geometric mean of the bounds.
IndexMatrix gss_hub(const BoundMatrix& bm);

// Valuation of one country outside a consistent constraint set. The set of
// countries revealed worse than the outsider is found from the outsider's
// own edges (p_k · q_u <= m_k) followed by RP-walks inside the set.
class OutsiderExtension {
 public:
  // `hub` must satisfy the cycle condition.
  OutsiderExtension(const PooledDataset& hub, CountryObservation outsider);

  const std::vector<std::size_t>& revealed_worse() const { return vrw_; }  // indices into hub
  // False when the budget equality conflicts with the hub restrictions.
  bool extendable() const { return upper_region_.feasible(); }
  double expenditure() const { return m_; }

  // Cheapest expenditure at `at` that keeps the outsider's utility.
  MinusResult lower(std::span<const double> at) const;
  // Largest expenditure at `at` among bundles on the outsider's budget line
  // permitted by the hub; nullopt when not extendable.
  std::optional<MinusResult> upper(std::span<const double> at) const;

 private:
  CountryObservation outsider_;
  double m_ = 0.0;
  std::vector<std::size_t> vrw_;
  FeasibleRegion lower_region_;
  FeasibleRegion upper_region_;
};

enum class ExtensionStatus { Hub, Extended, NoExtension };

const char* to_string(ExtensionStatus s);

struct OutsideResult {
  ExtensionStatus status = ExtensionStatus::NoExtension;
  std::vector<std::size_t> vrw;   // hub indices revealed worse than the outsider
  double lower = 0.0;             // lower bound on P_target / P_outsider
  double upper = 0.0;             // upper bound, +inf without extension
  double value = 0.0;             // geometric mean, NaN without extension
  std::vector<double> forecast;   // maximising bundle q*
};

// Bounds on P_target / P_outsider at the outsider's indifference base,
// where `target` indexes the hub dataset.
OutsideResult gss_outside(const PooledDataset& hub, const CountryObservation& outsider,
                          std::size_t target);

struct OutsiderRecord {
  std::size_t country = 0;  // index into the full dataset
  OutsideResult result;     // against the publication anchor
  bool accumulated = false; // forecast kept as a constraint for later outsiders
};

struct GssTableRow {
  std::string country;
  double ppp_vs_base = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool in_hub = false;
  ExtensionStatus status = ExtensionStatus::Hub;
};

struct GSSResult {
  std::vector<std::size_t> hub;  // ascending dataset indices
  std::vector<bool> in_hub;
  std::size_t base = 0;
  std::size_t anchor = 0;  // hub country the table is computed against
  std::vector<OutsiderRecord> outside;  // in processing order
  BoundMatrix bounds;   // Laspeyres style over all countries
  Matrix pairwise;      // sqrt(lower * upper) per entry, NaN where unbounded
  IndexMatrix index;    // circular, from the published table
  std::vector<GssTableRow> table;
};

struct GssOptions {
  bool exact_subset = false;
};

GSSResult gss_full(const PooledDataset& data, const GssOptions& options = {});

struct HomotheticResult {
  std::vector<std::size_t> hub;
  Matrix upper;     // minimum path product of Laspeyres price weights, i -> j
  Matrix lower;     // 1 / upper(j, i)
  Matrix pairwise;  // sqrt(lower * upper)
  IndexMatrix index;  // circular potential index over the hub
};

// Throws InconsistentDataError when the hub violates HARP.
HomotheticResult gss_homothetic(const PooledDataset& data, std::span<const std::size_t> hub);

}  // namespace refcon

#include "refcon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "refcon/csv.hpp"
#include "refcon/error.hpp"
#include "refcon/kernels.hpp"

namespace refcon {

double CountryObservation::expenditure() const {
  return kernels::dot(prices, quantities);
}

PooledDataset::PooledDataset(std::vector<CountryObservation> observations,
                             std::string base_country,
                             std::vector<std::string> heading_labels)
    : observations_(std::move(observations)), headings_(std::move(heading_labels)) {
  if (observations_.empty()) throw EmptyDatasetError("dataset has no observations");
  goods_ = observations_.front().prices.size();
  if (goods_ == 0) throw ValidationError("observations have no goods");
  if (!headings_.empty() && headings_.size() != goods_) {
    throw StructuralError("heading label count does not match K");
  }

  std::unordered_set<std::string> seen;
  expenditure_.reserve(observations_.size());
  for (const auto& obs : observations_) {
    if (!seen.insert(obs.id).second) {
      throw ValidationError("duplicate country id '" + obs.id + "'");
    }
    if (obs.prices.size() != goods_ || obs.quantities.size() != goods_) {
      throw ValidationError("country '" + obs.id + "' does not have K=" +
                            std::to_string(goods_) + " prices and quantities");
    }
    for (std::size_t k = 0; k < goods_; ++k) {
      if (!(obs.prices[k] > 0.0) || !std::isfinite(obs.prices[k])) {
        throw ValidationError("country '" + obs.id + "' has non-positive price in good " +
                              std::to_string(k + 1));
      }
      if (!(obs.quantities[k] >= 0.0) || !std::isfinite(obs.quantities[k])) {
        throw ValidationError("country '" + obs.id + "' has negative quantity in good " +
                              std::to_string(k + 1));
      }
    }
    if (obs.population && !(*obs.population > 0.0)) {
      throw ValidationError("country '" + obs.id + "' has non-positive population");
    }
    if (obs.market_rate && !(*obs.market_rate > 0.0)) {
      throw ValidationError("country '" + obs.id + "' has non-positive market rate");
    }
    const double m = obs.expenditure();
    if (!(m > 0.0)) {
      throw ValidationError("country '" + obs.id + "' has zero total expenditure");
    }
    expenditure_.push_back(m);
  }

  const auto it = std::find_if(observations_.begin(), observations_.end(),
                               [&](const auto& o) { return o.id == base_country; });
  if (it == observations_.end()) {
    throw ConfigurationError("base country '" + base_country + "' not in dataset");
  }
  base_ = static_cast<std::size_t>(it - observations_.begin());
}

std::optional<std::size_t> PooledDataset::find(const std::string& id) const {
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    if (observations_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t PooledDataset::index_of(const std::string& id) const {
  if (auto i = find(id)) return *i;
  throw ConfigurationError("unknown country '" + id + "'");
}

PooledDataset PooledDataset::subset(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw EmptyDatasetError("empty subset");
  std::vector<CountryObservation> obs;
  obs.reserve(indices.size());
  std::string base = observations_[indices.front()].id;
  for (std::size_t i : indices) {
    obs.push_back(observations_.at(i));
    if (i == base_) base = base_id();
  }
  return PooledDataset(std::move(obs), base, headings_);
}

PooledDataset PooledDataset::with_base(const std::string& id) const {
  return PooledDataset(observations_, id, headings_);
}

PooledDataset PooledDataset::with_observation(CountryObservation extra) const {
  auto obs = observations_;
  obs.push_back(std::move(extra));
  return PooledDataset(std::move(obs), base_id(), headings_);
}

namespace {

struct LabelledGrid {
  std::vector<std::string> headings;
  std::vector<std::string> countries;
  std::vector<std::vector<std::optional<double>>> cells;  // [heading][country]
};

LabelledGrid read_grid(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  if (t.rows.empty()) throw EmptyDatasetError(path.string() + " is empty");
  LabelledGrid g;
  const auto& header = t.rows.front();
  if (header.size() < 2) {
    throw ParseError(t.source, 1, header.size(), "header has no country columns");
  }
  g.countries.assign(header.begin() + 1, header.end());
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < g.countries.size(); ++c) {
    if (g.countries[c].empty()) throw ParseError(t.source, 1, c + 2, "empty country code");
    if (!seen.insert(g.countries[c]).second) {
      throw ParseError(t.source, 1, c + 2, "duplicate country '" + g.countries[c] + "'");
    }
  }
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != header.size()) {
      throw ParseError(t.source, r + 1, std::min(row.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(row.size()));
    }
    g.headings.push_back(row[0]);
    auto& cells = g.cells.emplace_back();
    for (std::size_t c = 1; c < row.size(); ++c) {
      cells.push_back(csv::to_optional_double(row[c], t, r, c));
    }
  }
  return g;
}

}  // namespace

RawICPTable ingest_icp(const std::filesystem::path& ppp_file,
                       const std::filesystem::path& expenditure_file,
                       const std::string& base,
                       const std::optional<std::filesystem::path>& aux_file) {
  const LabelledGrid ppp = read_grid(ppp_file);
  const LabelledGrid exp = read_grid(expenditure_file);

  for (const auto& c : exp.countries) {
    if (std::find(ppp.countries.begin(), ppp.countries.end(), c) == ppp.countries.end()) {
      throw StructuralError("country '" + c + "' is missing from the PPP table " +
                            ppp_file.string());
    }
  }
  for (const auto& c : ppp.countries) {
    if (std::find(exp.countries.begin(), exp.countries.end(), c) == exp.countries.end()) {
      throw StructuralError("country '" + c + "' is missing from the expenditure table " +
                            expenditure_file.string());
    }
  }
  if (ppp.headings.size() != exp.headings.size()) {
    throw StructuralError("PPP table has " + std::to_string(ppp.headings.size()) +
                          " headings, expenditure table has " +
                          std::to_string(exp.headings.size()));
  }
  std::map<std::string, std::size_t> exp_row;
  for (std::size_t k = 0; k < exp.headings.size(); ++k) exp_row[exp.headings[k]] = k;
  std::map<std::string, std::size_t> exp_col;
  for (std::size_t c = 0; c < exp.countries.size(); ++c) exp_col[exp.countries[c]] = c;

  RawICPTable raw;
  raw.heading_labels = ppp.headings;
  raw.country_labels = ppp.countries;
  const std::size_t K = ppp.headings.size();
  const std::size_t N = ppp.countries.size();
  raw.ppp = Matrix(K, N);
  raw.expenditure = Matrix(K, N);
  raw.ppp_missing.assign(K * N, false);
  raw.expenditure_missing.assign(K * N, false);
  for (std::size_t k = 0; k < K; ++k) {
    const auto er = exp_row.find(ppp.headings[k]);
    if (er == exp_row.end()) {
      throw StructuralError("heading '" + ppp.headings[k] +
                            "' is missing from the expenditure table");
    }
    for (std::size_t n = 0; n < N; ++n) {
      const auto& pv = ppp.cells[k][n];
      const auto& ev = exp.cells[er->second][exp_col.at(ppp.countries[n])];
      if (pv) raw.ppp(k, n) = *pv; else raw.ppp_missing[k * N + n] = true;
      if (ev) raw.expenditure(k, n) = *ev; else raw.expenditure_missing[k * N + n] = true;
    }
  }

  raw.population.assign(N, std::nullopt);
  raw.market_rate.assign(N, std::nullopt);
  if (aux_file) {
    const csv::Table t = csv::read(*aux_file);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      if (r == 0 && !row.empty() && row[0] == "country") continue;
      if (row.size() < 2 || row.size() > 3) {
        throw ParseError(t.source, r + 1, row.size(),
                         "expected country,population,market_rate");
      }
      const auto it = std::find(raw.country_labels.begin(), raw.country_labels.end(), row[0]);
      if (it == raw.country_labels.end()) continue;
      const auto n = static_cast<std::size_t>(it - raw.country_labels.begin());
      raw.population[n] = csv::to_optional_double(row[1], t, r, 1);
      if (row.size() == 3) raw.market_rate[n] = csv::to_optional_double(row[2], t, r, 2);
    }
  }

  if (std::find(raw.country_labels.begin(), raw.country_labels.end(), base) ==
      raw.country_labels.end()) {
    throw ConfigurationError("base country '" + base + "' not in the ICP tables");
  }
  raw.base_country = base;
  return raw;
}

PooledDataset convert(const RawICPTable& raw, ConversionReport* report) {
  const std::size_t K = raw.headings();
  const std::size_t N = raw.countries();
  ConversionReport local;

  std::vector<std::size_t> kept_countries;
  for (std::size_t n = 0; n < N; ++n) {
    bool ok = true;
    for (std::size_t k = 0; k < K && ok; ++k) {
      ok = !raw.ppp_is_missing(k, n) && !raw.expenditure_is_missing(k, n);
    }
    if (ok) {
      kept_countries.push_back(n);
    } else {
      local.dropped_countries.push_back(raw.country_labels[n]);
    }
  }

  std::vector<std::size_t> kept_headings;
  for (std::size_t k = 0; k < K; ++k) {
    const bool negative = std::any_of(kept_countries.begin(), kept_countries.end(),
                                      [&](std::size_t n) { return raw.expenditure(k, n) < 0.0; });
    if (negative) {
      local.dropped_headings.push_back(raw.heading_labels[k]);
    } else {
      kept_headings.push_back(k);
    }
  }

  if (report) *report = local;
  if (kept_countries.empty() || kept_headings.empty()) {
    throw EmptyDatasetError("every country or heading was excluded");
  }
  const bool base_kept = std::any_of(kept_countries.begin(), kept_countries.end(), [&](std::size_t n) {
    return raw.country_labels[n] == raw.base_country;
  });
  if (!base_kept) {
    throw ConfigurationError("base country '" + raw.base_country +
                             "' was excluded (missing prices)");
  }

  std::vector<CountryObservation> obs;
  for (std::size_t n : kept_countries) {
    CountryObservation o;
    o.id = raw.country_labels[n];
    for (std::size_t k : kept_headings) {
      const double pi = raw.ppp(k, n);
      o.prices.push_back(pi);
      o.quantities.push_back(pi > 0.0 ? raw.expenditure(k, n) / pi : 0.0);
    }
    if (n < raw.population.size()) o.population = raw.population[n];
    if (n < raw.market_rate.size()) o.market_rate = raw.market_rate[n];
    obs.push_back(std::move(o));
  }
  std::vector<std::string> labels;
  for (std::size_t k : kept_headings) labels.push_back(raw.heading_labels[k]);
  return PooledDataset(std::move(obs), raw.base_country, std::move(labels));
}

PooledDataset load_direct(const std::filesystem::path& file,
                          const std::optional<std::string>& base) {
  const csv::Table t = csv::read(file);
  std::size_t first = 0;
  if (!t.rows.empty() && !t.rows[0].empty() && t.rows[0][0] == "country") first = 1;
  if (t.rows.size() <= first) throw EmptyDatasetError(file.string() + " has no observations");

  const std::size_t width = t.rows[first].size();
  if (width < 3 || (width - 1) % 2 != 0) {
    throw ParseError(t.source, first + 1, width,
                     "expected country,p_1..p_K,q_1..q_K");
  }
  const std::size_t K = (width - 1) / 2;
  std::vector<CountryObservation> obs;
  for (std::size_t r = first; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != width) {
      throw ParseError(t.source, r + 1, std::min(row.size(), width) + 1,
                       "expected " + std::to_string(width) + " cells");
    }
    CountryObservation o;
    o.id = row[0];
    for (std::size_t k = 0; k < K; ++k) {
      o.prices.push_back(csv::to_double(row[1 + k], t, r, 1 + k));
      o.quantities.push_back(csv::to_double(row[1 + K + k], t, r, 1 + K + k));
    }
    obs.push_back(std::move(o));
  }
  const std::string base_id = base.value_or(obs.front().id);
  return PooledDataset(std::move(obs), base_id);
}

PooledDataset apply_aux(const PooledDataset& data,
                        const std::filesystem::path& aux_file) {
  const csv::Table t = csv::read(aux_file);
  std::vector<CountryObservation> obs(data.observations().begin(),
                                      data.observations().end());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (r == 0 && !row.empty() && row[0] == "country") continue;
    if (row.size() < 2 || row.size() > 3) {
      throw ParseError(t.source, r + 1, row.size(), "expected country,population,market_rate");
    }
    const auto i = data.find(row[0]);
    if (!i) continue;
    obs[*i].population = csv::to_optional_double(row[1], t, r, 1);
    if (row.size() == 3) obs[*i].market_rate = csv::to_optional_double(row[2], t, r, 2);
  }
  return PooledDataset(std::move(obs), data.base_id(), data.heading_labels());
}

}  // namespace refcon

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refcon/matrix.hpp"

namespace refcon {

// One country's budget: prices in base-currency units per basic heading and
// per-capita volumes in base-currency units.
struct CountryObservation {
  std::string id;
  std::vector<double> prices;
  std::vector<double> quantities;
  std::optional<double> population;
  std::optional<double> market_rate;  // LCU per base-currency unit

  double expenditure() const;
};

// Immutable, validated set of observations sharing K goods, with one
// designated base country. Safe to share across threads once built.
class PooledDataset {
 public:
  // Throws EmptyDatasetError, ValidationError or ConfigurationError.
  PooledDataset(std::vector<CountryObservation> observations,
                std::string base_country,
                std::vector<std::string> heading_labels = {});

  std::size_t size() const { return observations_.size(); }
  std::size_t goods() const { return goods_; }

  const CountryObservation& operator[](std::size_t i) const {
    return observations_[i];
  }
  std::span<const CountryObservation> observations() const {
    return observations_;
  }
  const std::vector<std::string>& heading_labels() const { return headings_; }

  std::size_t base() const { return base_; }
  const std::string& base_id() const { return observations_[base_].id; }

  // p_i · q_i, cached at construction.
  double expenditure(std::size_t i) const { return expenditure_[i]; }

  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;  // throws ConfigurationError

  // Observations at the given positions, in that order. The base is kept
  // when selected, otherwise the first selected country becomes the base.
  PooledDataset subset(std::span<const std::size_t> indices) const;
  PooledDataset with_base(const std::string& id) const;
  PooledDataset with_observation(CountryObservation extra) const;

 private:
  std::vector<CountryObservation> observations_;
  std::vector<std::string> headings_;
  std::vector<double> expenditure_;
  std::size_t goods_ = 0;
  std::size_t base_ = 0;
};

// Basic-heading PPPs and nominal expenditures as published, K headings by
// N countries, with missing cells tracked separately from values.
struct RawICPTable {
  std::vector<std::string> heading_labels;
  std::vector<std::string> country_labels;
  Matrix ppp;          // K x N, LCU per base-currency unit
  Matrix expenditure;  // K x N, per-capita LCU
  std::vector<bool> ppp_missing;          // row-major K x N
  std::vector<bool> expenditure_missing;  // row-major K x N
  std::vector<std::optional<double>> population;   // per country
  std::vector<std::optional<double>> market_rate;  // per country
  std::string base_country;

  std::size_t headings() const { return heading_labels.size(); }
  std::size_t countries() const { return country_labels.size(); }
  bool ppp_is_missing(std::size_t k, std::size_t n) const {
    return ppp_missing[k * countries() + n];
  }
  bool expenditure_is_missing(std::size_t k, std::size_t n) const {
    return expenditure_missing[k * countries() + n];
  }
};

struct ConversionReport {
  std::vector<std::string> dropped_countries;  // missing price or expenditure
  std::vector<std::string> dropped_headings;   // negative expenditure somewhere
};

// Reads the PPP and expenditure tables (header row of country codes, first
// column of heading labels) plus an optional `country,population,market_rate`
// file. Tables must carry the same countries and headings, in any order;
// the expenditure table is aligned to the PPP table's order.
RawICPTable ingest_icp(const std::filesystem::path& ppp_file,
                       const std::filesystem::path& expenditure_file,
                       const std::string& base,
                       const std::optional<std::filesystem::path>& aux_file = {});

// p = π, q = e / π. Countries with any missing price (or expenditure) are
// dropped first, then headings with a negative expenditure in any kept
// country.
PooledDataset convert(const RawICPTable& raw, ConversionReport* report = nullptr);

// Direct format: `country,p_1..p_K,q_1..q_K`, optional header row whose first
// cell is "country". The base defaults to the first row.
PooledDataset load_direct(const std::filesystem::path& file,
                          const std::optional<std::string>& base = {});

// Attaches population and market rates from an aux CSV. Countries absent from
// the file keep their current values.
PooledDataset apply_aux(const PooledDataset& data,
                        const std::filesystem::path& aux_file);

}  // namespace refcon

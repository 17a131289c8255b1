#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "refcon/bounds.hpp"
#include "refcon/indices.hpp"

namespace refcon {

// Which pairs count, by whether the indifference base of the pair belongs
// to the reference-consumer set.
enum class Segment { All, BaseInRc, BaseOutRc };

const char* to_string(Segment s);
std::optional<Segment> parse_segment(const std::string& name);  // all, in-rc, out-rc

enum class Side { None, Lower, Upper };

const char* to_string(Side s);

struct PairRecord {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Side side = Side::None;
  double overshoot = 0.0;  // value/upper - 1 or lower/value - 1
};

struct AppraisalReport {
  IndexMethod method = IndexMethod::Fisher;
  Segment segment = Segment::All;
  std::size_t pairs = 0;  // denominator, N^2 for Segment::All
  std::size_t upper_violations = 0;
  std::size_t lower_violations = 0;
  double error_rate = 0.0;
  double error_magnitude = 0.0;  // mean overshoot among violators, 0 if none
  std::vector<PairRecord> per_pair;  // every counted pair, row-major
};

// `in_rc` flags reference-set membership per country; empty means all.
// Throws StructuralError when the two matrices list different countries.
AppraisalReport appraise(const IndexMatrix& index, const BoundMatrix& bm,
                         Segment segment = Segment::All,
                         const std::vector<bool>& in_rc = {});

struct ComparisonRow {
  std::string label;
  std::optional<double> rate_delta;
  std::optional<double> magnitude_delta;
};

// Design comparisons: (1a) GK-GEKS, (1b) GK-CCD, (2) GEKS alone,
// (3a) GEKS-Fisher, (3b) CCD-Tornqvist. Rows with a missing report have
// empty deltas.
std::vector<ComparisonRow> comparison_table(std::span<const AppraisalReport> reports);

// Midpoint of the bounds for a value outside them, the value otherwise.
double taste_correct_value(double value, double lower, double upper);

struct Correction {
  std::size_t i = 0;
  std::size_t j = 0;
  double original = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double corrected = 0.0;
};

struct CorrectedIndex {
  IndexMatrix index;
  std::vector<Correction> log;
};

CorrectedIndex taste_correct(const IndexMatrix& index, const BoundMatrix& bm);

}  // namespace refcon

#include "refcon/appraisal.hpp"

#include <algorithm>

#include "refcon/error.hpp"

namespace refcon {
namespace {

void require_same_order(const IndexMatrix& index, const BoundMatrix& bm) {
  if (index.ids != bm.ids) {
    throw StructuralError("index and bound matrices list different countries or orders");
  }
}

Side classify(double value, double lower, double upper) {
  if (value > upper * (1.0 + kTauLp)) return Side::Upper;
  if (value < lower * (1.0 - kTauLp)) return Side::Lower;
  return Side::None;
}

}  // namespace

const char* to_string(Segment s) {
  switch (s) {
    case Segment::All: return "all";
    case Segment::BaseInRc: return "in-rc";
    case Segment::BaseOutRc: return "out-rc";
  }
  return "?";
}

std::optional<Segment> parse_segment(const std::string& name) {
  for (auto s : {Segment::All, Segment::BaseInRc, Segment::BaseOutRc}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

const char* to_string(Side s) {
  switch (s) {
    case Side::None: return "none";
    case Side::Lower: return "lower";
    case Side::Upper: return "upper";
  }
  return "?";
}

AppraisalReport appraise(const IndexMatrix& index, const BoundMatrix& bm, Segment segment,
                         const std::vector<bool>& in_rc) {
  require_same_order(index, bm);
  const std::size_t n = bm.size();
  if (!in_rc.empty() && in_rc.size() != n) {
    throw StructuralError("reference-set flags do not match the country count");
  }
  AppraisalReport r;
  r.method = index.method;
  r.segment = segment;
  double overshoot_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t base = bm.indifference_base(i, j);
      const bool base_in = in_rc.empty() || in_rc[base];
      if ((segment == Segment::BaseInRc && !base_in) ||
          (segment == Segment::BaseOutRc && base_in)) {
        continue;
      }
      PairRecord p{i, j, index.values(i, j), bm.lower(i, j), bm.upper(i, j), Side::None, 0.0};
      p.side = classify(p.value, p.lower, p.upper);
      if (p.side == Side::Upper) {
        p.overshoot = p.value / p.upper - 1.0;
        ++r.upper_violations;
      } else if (p.side == Side::Lower) {
        p.overshoot = p.lower / p.value - 1.0;
        ++r.lower_violations;
      }
      overshoot_sum += p.overshoot;
      r.per_pair.push_back(p);
    }
  }
  r.pairs = r.per_pair.size();
  const std::size_t violators = r.upper_violations + r.lower_violations;
  if (r.pairs > 0) r.error_rate = static_cast<double>(violators) / static_cast<double>(r.pairs);
  if (violators > 0) r.error_magnitude = overshoot_sum / static_cast<double>(violators);
  return r;
}

std::vector<ComparisonRow> comparison_table(std::span<const AppraisalReport> reports) {
  auto find = [&](IndexMethod m) -> const AppraisalReport* {
    for (const auto& r : reports) {
      if (r.method == m) return &r;
    }
    return nullptr;
  };
  auto delta = [&](const char* label, IndexMethod a, std::optional<IndexMethod> b) {
    ComparisonRow row{label, std::nullopt, std::nullopt};
    const AppraisalReport* ra = find(a);
    const AppraisalReport* rb = b ? find(*b) : nullptr;
    if (ra && (!b || rb)) {
      row.rate_delta = ra->error_rate - (rb ? rb->error_rate : 0.0);
      row.magnitude_delta = ra->error_magnitude - (rb ? rb->error_magnitude : 0.0);
    }
    return row;
  };
  return {
      delta("(1a) GK-GEKS", IndexMethod::GearyKhamis, IndexMethod::Geks),
      delta("(1b) GK-CCD", IndexMethod::GearyKhamis, IndexMethod::Ccd),
      delta("(2) GEKS", IndexMethod::Geks, std::nullopt),
      delta("(3a) GEKS-Fisher", IndexMethod::Geks, IndexMethod::Fisher),
      delta("(3b) CCD-Tornqvist", IndexMethod::Ccd, IndexMethod::Tornqvist),
  };
}

double taste_correct_value(double value, double lower, double upper) {
  if (classify(value, lower, upper) == Side::None) return value;
  return 0.5 * (lower + upper);
}

CorrectedIndex taste_correct(const IndexMatrix& index, const BoundMatrix& bm) {
  require_same_order(index, bm);
  CorrectedIndex out{index, {}};
  for (std::size_t i = 0; i < bm.size(); ++i) {
    for (std::size_t j = 0; j < bm.size(); ++j) {
      const double v = index.values(i, j);
      const double c = taste_correct_value(v, bm.lower(i, j), bm.upper(i, j));
      if (c != v) {
        out.index.values(i, j) = c;
        out.log.push_back({i, j, v, bm.lower(i, j), bm.upper(i, j), c});
      }
    }
  }
  return out;
}

}  // namespace refcon

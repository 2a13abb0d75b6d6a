#include "pcbayes/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace pcbayes {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::UncoveredCategory: return "UncoveredCategory";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OverlappingSchemeUnsupported: return "OverlappingSchemeUnsupported";
    case ErrorCode::OverlappingSchemeWithoutReportingMap:
      return "OverlappingSchemeWithoutReportingMap";
    case ErrorCode::NonpositiveEntry: return "NonpositiveEntry";
    case ErrorCode::NotOnSimplex: return "NotOnSimplex";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
    case ErrorCode::TotalMismatch: return "TotalMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool Error::is_numeric() const noexcept {
  return code_ == ErrorCode::EnumerationTooLarge || code_ == ErrorCode::DegenerateGroup ||
         code_ == ErrorCode::GridTooLarge;
}

// ---------------------------------------------------------------------------

CategoryScheme::CategoryScheme(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a category scheme needs k >= 2 categories");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw Error(ErrorCode::InvalidArgument, "empty category label");
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate category label '" + label + "'");
    }
  }
}

CategoryScheme CategoryScheme::numbered(std::size_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) labels.push_back(std::to_string(i));
  return CategoryScheme(std::move(labels));
}

// ---------------------------------------------------------------------------

AggregationScheme AggregationScheme::validate(const std::vector<Group>& declared, std::size_t k,
                                              SchemeOptions options) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (declared.empty()) throw Error(ErrorCode::InvalidArgument, "no groups declared");

  std::vector<Group> groups;
  groups.reserve(declared.size() + 1);
  std::vector<bool> covered(k, false);
  for (std::size_t j = 0; j < declared.size(); ++j) {
    Group g = declared[j];
    if (g.empty()) {
      throw Error(ErrorCode::EmptyGroup, "group " + std::to_string(j) + " is empty");
    }
    for (Index i : g) {
      if (i >= k) {
        std::ostringstream msg;
        msg << "category index " << i + 1 << " outside 1.." << k;
        throw Error(ErrorCode::IndexOutOfRange, msg.str());
      }
      covered[i] = true;
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    groups.push_back(std::move(g));
  }

  Group complement;
  for (Index i = 0; i < k; ++i) {
    if (!covered[i]) complement.push_back(i);
  }

  AggregationScheme scheme;
  scheme.k_ = k;
  if (!complement.empty()) {
    if (!options.allow_implicit_complement) {
      throw Error(ErrorCode::UncoveredCategory,
                  "category " + std::to_string(complement.front() + 1) + " is in no group");
    }
    groups.insert(groups.begin(), std::move(complement));
    scheme.implicit_complement_ = true;
  }

  scheme.memberships_.assign(k, {});
  for (std::size_t j = 0; j < groups.size(); ++j) {
    for (Index i : groups[j]) scheme.memberships_[i].push_back(j);
  }
  scheme.overlapping_ = std::any_of(scheme.memberships_.begin(), scheme.memberships_.end(),
                                    [](const auto& m) { return m.size() > 1; });
  scheme.groups_ = std::move(groups);
  return scheme;
}

AggregationScheme AggregationScheme::trivial(std::size_t k) {
  Group all(k);
  std::iota(all.begin(), all.end(), Index{0});
  return validate({all}, k);
}

std::size_t AggregationScheme::group_of(Index i) const {
  require_disjoint("group_of");
  return memberships_.at(i).front();
}

void AggregationScheme::require_disjoint(const char* operation) const {
  if (overlapping_) {
    throw Error(ErrorCode::OverlappingSchemeUnsupported,
                std::string(operation) + " requires a disjoint aggregation scheme");
  }
}

AggregationScheme validate_scheme(const std::vector<Group>& declared, std::size_t k,
                                  SchemeOptions options) {
  return AggregationScheme::validate(declared, k, options);
}

// ---------------------------------------------------------------------------

ReportingMap ReportingMap::lowest_index(const AggregationScheme& scheme) {
  std::vector<std::size_t> map(scheme.k());
  for (Index i = 0; i < scheme.k(); ++i) map[i] = scheme.memberships(i).front();
  return ReportingMap(std::move(map));
}

ReportingMap ReportingMap::from_groups(const AggregationScheme& scheme,
                                       std::vector<std::size_t> group_for_category) {
  if (group_for_category.size() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "reporting map needs one group per category");
  }
  for (Index i = 0; i < scheme.k(); ++i) {
    const auto& m = scheme.memberships(i);
    if (std::find(m.begin(), m.end(), group_for_category[i]) == m.end()) {
      throw Error(ErrorCode::InvalidArgument, "reporting map sends category " +
                                                  std::to_string(i + 1) +
                                                  " to a group that does not contain it");
    }
  }
  return ReportingMap(std::move(group_for_category));
}

// ---------------------------------------------------------------------------

namespace {

Count checked_total(std::span<const Count> counts, const char* what) {
  Count sum = 0;
  for (Count c : counts) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, std::string("negative count in ") + what);
    sum += c;
  }
  return sum;
}

}  // namespace

CountData::CountData(CountVector x, CountVector y) : x_(std::move(x)), y_(std::move(y)) {
  n_ = checked_total(x_, "x");
  n_prime_ = checked_total(y_, "y");
}

void CountData::check_against(const AggregationScheme& scheme) const {
  if (x_.size() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "x has " + std::to_string(x_.size()) +
                                                  " entries, scheme has k=" +
                                                  std::to_string(scheme.k()));
  }
  if (y_.size() != scheme.group_count()) {
    throw Error(ErrorCode::DimensionMismatch, "y has " + std::to_string(y_.size()) +
                                                  " entries, scheme has " +
                                                  std::to_string(scheme.group_count()) +
                                                  " groups");
  }
}

// ---------------------------------------------------------------------------

DirichletPrior::DirichletPrior(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw Error(ErrorCode::InvalidArgument, "empty Dirichlet parameter");
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::NonpositiveEntry, "Dirichlet parameters must be finite and > 0");
    }
  }
  alpha_sum_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

DirichletPrior DirichletPrior::symmetric(std::size_t k, double concentration) {
  return DirichletPrior(std::vector<double>(k, concentration));
}

std::vector<double> DirichletPrior::group_alpha(const AggregationScheme& scheme) const {
  if (scheme.k() != k()) {
    throw Error(ErrorCode::DimensionMismatch, "prior and scheme disagree on k");
  }
  std::vector<double> sums(scheme.group_count(), 0.0);
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    for (Index i : scheme.group(j)) sums[j] += alpha_[i];
  }
  return sums;
}

// ---------------------------------------------------------------------------

ProbabilityVector::ProbabilityVector(std::vector<double> p, double tolerance) : p_(std::move(p)) {
  if (p_.empty()) throw Error(ErrorCode::NotOnSimplex, "empty probability vector");
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::NotOnSimplex, "probabilities must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum;
    throw Error(ErrorCode::NotOnSimplex, msg.str());
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t k) {
  return ProbabilityVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

bool ProbabilityVector::strictly_positive() const noexcept {
  return std::all_of(p_.begin(), p_.end(), [](double v) { return v > 0.0; });
}

// ---------------------------------------------------------------------------

CountVector aggregate(std::span<const Count> x_full, const AggregationScheme& scheme) {
  scheme.require_disjoint("aggregate");
  return aggregate(x_full, scheme, ReportingMap::lowest_index(scheme));
}

CountVector aggregate(std::span<const Count> x_full, const AggregationScheme& scheme,
                      const ReportingMap& reporting) {
  if (x_full.size() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "count vector length differs from k");
  }
  CountVector y(scheme.group_count(), 0);
  for (Index i = 0; i < x_full.size(); ++i) y[reporting[i]] += x_full[i];
  return y;
}

std::vector<double> group_mass(std::span<const double> theta, const AggregationScheme& scheme) {
  if (theta.size() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "probability vector length differs from k");
  }
  std::vector<double> mass(scheme.group_count(), 0.0);
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    for (Index i : scheme.group(j)) mass[j] += theta[i];
  }
  return mass;
}

Count total(std::span<const Count> counts) {
  return std::accumulate(counts.begin(), counts.end(), Count{0});
}

}  // namespace pcbayes

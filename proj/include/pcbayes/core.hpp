#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcbayes {

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  EmptyGroup,
  UncoveredCategory,
  DimensionMismatch,
  OverlappingSchemeUnsupported,
  OverlappingSchemeWithoutReportingMap,
  NonpositiveEntry,
  NotOnSimplex,
  DegenerateGroup,
  EnumerationTooLarge,
  GridTooLarge,
  RowMismatch,
  SchemeMismatch,
  TotalMismatch,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the inputs.
  bool is_numeric() const noexcept;

 private:
  ErrorCode code_;
};

using Count = std::int64_t;
using Index = std::size_t;
using CountVector = std::vector<Count>;
using Group = std::vector<Index>;

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kArithmeticTolerance = 1e-9;

/// The fine categories S = {0..k-1} with display labels.
class CategoryScheme {
 public:
  explicit CategoryScheme(std::vector<std::string> labels);

  /// Labels "1".."k".
  static CategoryScheme numbered(std::size_t k);

  std::size_t k() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<std::string> labels_;
};

struct SchemeOptions {
  /// When false, a category that no declared group covers is an error
  /// instead of being collected into a leading complement group.
  bool allow_implicit_complement = true;
};

/// Groups A_0..A_m over the fine categories, 0-based.
///
/// The declared groups are kept in order. If they leave some categories
/// uncovered, those categories form a complement group that is placed first
/// (it plays the role of A_0). If the declared groups cover everything there
/// is no complement and the first declared group is A_0. In both cases every
/// stored group is non-empty, sorted and duplicate-free, and aggregated
/// vectors have one entry per stored group.
class AggregationScheme {
 public:
  static AggregationScheme validate(const std::vector<Group>& declared,
                                    std::size_t k, SchemeOptions options = {});

  /// Single group holding every category.
  static AggregationScheme trivial(std::size_t k);

  std::size_t k() const noexcept { return k_; }
  std::size_t group_count() const noexcept { return groups_.size(); }
  const std::vector<Group>& groups() const noexcept { return groups_; }
  const Group& group(std::size_t j) const { return groups_.at(j); }

  bool overlapping() const noexcept { return overlapping_; }
  bool disjoint() const noexcept { return !overlapping_; }
  bool has_implicit_complement() const noexcept { return implicit_complement_; }

  /// Groups that contain category i, ascending.
  const std::vector<std::size_t>& memberships(Index i) const { return memberships_.at(i); }

  /// The unique group containing i. Disjoint schemes only.
  std::size_t group_of(Index i) const;

  /// Throws OverlappingSchemeUnsupported when the scheme overlaps.
  void require_disjoint(const char* operation) const;

  bool operator==(const AggregationScheme& other) const noexcept {
    return k_ == other.k_ && groups_ == other.groups_;
  }

 private:
  AggregationScheme() = default;

  std::size_t k_ = 0;
  std::vector<Group> groups_;
  std::vector<std::vector<std::size_t>> memberships_;
  bool overlapping_ = false;
  bool implicit_complement_ = false;
};

/// Free-function form of AggregationScheme::validate.
AggregationScheme validate_scheme(const std::vector<Group>& declared, std::size_t k,
                                  SchemeOptions options = {});

/// Which group a unit of category i is reported under when the scheme
/// overlaps. For disjoint schemes this is just group_of.
class ReportingMap {
 public:
  /// Each category goes to the lowest-indexed group that contains it.
  static ReportingMap lowest_index(const AggregationScheme& scheme);

  static ReportingMap from_groups(const AggregationScheme& scheme,
                                  std::vector<std::size_t> group_for_category);

  std::size_t operator[](Index i) const { return map_.at(i); }
  const std::vector<std::size_t>& groups() const noexcept { return map_; }

 private:
  explicit ReportingMap(std::vector<std::size_t> map) : map_(std::move(map)) {}
  std::vector<std::size_t> map_;
};

/// Fully classified counts x (length k) and aggregated counts y (one per group).
class CountData {
 public:
  CountData(CountVector x, CountVector y);

  const CountVector& x() const noexcept { return x_; }
  const CountVector& y() const noexcept { return y_; }
  Count N() const noexcept { return n_; }
  Count N_prime() const noexcept { return n_prime_; }

  /// Throws DimensionMismatch unless x has k entries and y one per group.
  void check_against(const AggregationScheme& scheme) const;

 private:
  CountVector x_;
  CountVector y_;
  Count n_ = 0;
  Count n_prime_ = 0;
};

class DirichletPrior {
 public:
  explicit DirichletPrior(std::vector<double> alpha);

  static DirichletPrior symmetric(std::size_t k, double concentration);
  static DirichletPrior uniform(std::size_t k) { return symmetric(k, 1.0); }
  static DirichletPrior jeffreys(std::size_t k) { return symmetric(k, 0.5); }

  std::size_t k() const noexcept { return alpha_.size(); }
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  double operator[](Index i) const { return alpha_[i]; }
  double alpha_sum() const noexcept { return alpha_sum_; }

  /// alpha_{A_j} for every group of the scheme.
  std::vector<double> group_alpha(const AggregationScheme& scheme) const;

 private:
  std::vector<double> alpha_;
  double alpha_sum_ = 0.0;
};

/// A point of the closed simplex.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> p, double tolerance = kSimplexTolerance);

  static ProbabilityVector uniform(std::size_t k);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](Index i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }
  std::span<const double> span() const noexcept { return p_; }
  bool strictly_positive() const noexcept;

  auto begin() const noexcept { return p_.begin(); }
  auto end() const noexcept { return p_.end(); }

 private:
  std::vector<double> p_;
};

/// y_j = sum of x_i over i in A_j. Disjoint schemes only.
CountVector aggregate(std::span<const Count> x_full, const AggregationScheme& scheme);

/// Aggregation for any scheme: every unit of category i is counted once, under
/// reporting[i].
CountVector aggregate(std::span<const Count> x_full, const AggregationScheme& scheme,
                      const ReportingMap& reporting);

/// theta_{A_j} for every group.
std::vector<double> group_mass(std::span<const double> theta, const AggregationScheme& scheme);

Count total(std::span<const Count> counts);

}  // namespace pcbayes

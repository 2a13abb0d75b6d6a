#pragma once

#include <cstdint>
#include <string>

#include "pcbayes/io.hpp"
#include "pcbayes/reconcile.hpp"

namespace pcbayes::fixtures {

using io::SchemeFile;

/// Six under-five age bands used by both published tables.
const std::vector<std::string>& age_labels();

/// China MCHSS deaths 1996-2005, 8 causes x 6 age bands (true panel).
const std::string& mchss_1996_2005_csv();
CountTable mchss_1996_2005();

/// Bangladesh DHS 2011 deaths, 11 causes x 6 age bands (true panel).
const std::string& bdhs_2011_csv();
CountTable bdhs_2011();

/// 0-27d, 1-11m, 12-59m: nested in the six bands.
SchemeFile mchss_scheme_file();

/// 0-3m, 4-11m, 12-59m: the 1-5m band straddles the first two groups.
SchemeFile bdhs_scheme_file();

inline constexpr double kSplitFraction = 0.5;
/// Share of 1-5m deaths reported as 0-3m (months 1-3 of 1-5).
inline constexpr double kBdhsEarlyShare = 0.6;

/// A reference/target pair carved out of one published table.
struct ReconcileFixture {
  std::string name;
  SchemeFile scheme_file;
  AggregationScheme scheme;
  CountTable reference;   // fine categories
  CountTable truth;       // fine categories, the held-out target
  CountTable aggregated;  // truth as the aggregated source reports it
};

/// Each death in each cell goes to the target with probability kSplitFraction,
/// otherwise to the reference (a stratified split per cause and age band).
/// The target is aggregated to 0-27d / 1-11m / 12-59m.
ReconcileFixture mchss_split_fixture(std::uint64_t seed);

/// Same split of the BDHS table; target 1-5m deaths are reported as 0-3m with
/// probability kBdhsEarlyShare and as 4-11m otherwise.
ReconcileFixture bdhs_split_fixture(std::uint64_t seed);

}  // namespace pcbayes::fixtures

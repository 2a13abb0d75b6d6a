#include "pcbayes/fixtures.hpp"

#include "pcbayes/random.hpp"

namespace pcbayes::fixtures {

namespace {

const std::string kMchss =
    "cause,0-6d,7-27d,1-5m,6-11m,12-23m,24-59m\n"
    "cause_1,3550,638,138,9,2,0\n"
    "cause_2,4398,183,24,0,0,0\n"
    "cause_3,1783,568,732,373,264,270\n"
    "cause_4,95,78,459,224,268,473\n"
    "cause_5,732,231,463,176,584,1333\n"
    "cause_6,39,92,501,361,270,196\n"
    "cause_7,1227,991,1671,570,428,328\n"
    "cause_8,1051,722,491,269,230,261\n";

const std::string kBdhs =
    "cause,0-6d,7-27d,1-5m,6-11m,12-23m,24-59m\n"
    "cause_1,4,4,0,0,0,0\n"
    "cause_2,1,3,0,0,0,0\n"
    "cause_3,0,0,0,1,13,12\n"
    "cause_4,55,2,0,0,0,0\n"
    "cause_5,9,0,0,0,0,0\n"
    "cause_6,0,0,4,2,4,0\n"
    "cause_7,22,21,39,14,6,7\n"
    "cause_8,5,5,0,0,0,0\n"
    "cause_9,26,5,0,0,0,0\n"
    "cause_10,44,14,0,0,0,0\n"
    "cause_11,0,0,1,1,0,0\n";

// Per cell binomial thinning; the stream for cause c is (seed, c).
void split_table(const CountTable& full, std::uint64_t seed, CountTable& reference,
                 CountTable& target) {
  reference = full;
  target = full;
  for (std::size_t c = 0; c < full.rows(); ++c) {
    random::Engine rng = random::make_engine(seed, c);
    for (std::size_t i = 0; i < full.columns(); ++i) {
      const Count t = random::binomial(rng, full.counts[c][i], kSplitFraction);
      target.counts[c][i] = t;
      reference.counts[c][i] = full.counts[c][i] - t;
    }
  }
}

CountTable aggregated_frame(const CountTable& truth, const AggregationScheme& scheme,
                            const std::vector<std::string>& labels) {
  CountTable out;
  out.row_labels = truth.row_labels;
  out.column_labels = labels;
  out.counts.assign(truth.rows(), CountVector(scheme.group_count(), 0));
  return out;
}

}  // namespace

const std::vector<std::string>& age_labels() {
  static const std::vector<std::string> labels{"0-6d", "7-27d", "1-5m",
                                               "6-11m", "12-23m", "24-59m"};
  return labels;
}

const std::string& mchss_1996_2005_csv() { return kMchss; }
CountTable mchss_1996_2005() { return io::parse_count_table(kMchss, "mchss_1996_2005"); }

const std::string& bdhs_2011_csv() { return kBdhs; }
CountTable bdhs_2011() { return io::parse_count_table(kBdhs, "bdhs_2011"); }

SchemeFile mchss_scheme_file() {
  SchemeFile file;
  file.k = 6;
  file.groups = {{0, 1}, {2, 3}, {4, 5}};
  file.labels = age_labels();
  return file;
}

SchemeFile bdhs_scheme_file() {
  SchemeFile file;
  file.k = 6;
  file.groups = {{0, 1, 2}, {2, 3}, {4, 5}};
  file.labels = age_labels();
  return file;
}

ReconcileFixture mchss_split_fixture(std::uint64_t seed) {
  SchemeFile file = mchss_scheme_file();
  AggregationScheme scheme = file.scheme();
  CountTable reference, truth;
  split_table(mchss_1996_2005(), seed, reference, truth);
  CountTable aggregated = aggregated_frame(truth, scheme, {"0-27d", "1-11m", "12-59m"});
  for (std::size_t c = 0; c < truth.rows(); ++c) aggregated.counts[c] = aggregate(truth.counts[c], scheme);
  return {"mchss", std::move(file), std::move(scheme), std::move(reference), std::move(truth),
          std::move(aggregated)};
}

ReconcileFixture bdhs_split_fixture(std::uint64_t seed) {
  SchemeFile file = bdhs_scheme_file();
  AggregationScheme scheme = file.scheme();
  CountTable reference, truth;
  split_table(bdhs_2011(), seed, reference, truth);
  CountTable aggregated = aggregated_frame(truth, scheme, {"0-3m", "4-11m", "12-59m"});
  const std::uint64_t report_seed = random::derive_seed(seed, 0x5e9047);
  for (std::size_t c = 0; c < truth.rows(); ++c) {
    const CountVector& t = truth.counts[c];
    random::Engine rng = random::make_engine(report_seed, c);
    const Count early = random::binomial(rng, t[2], kBdhsEarlyShare);
    aggregated.counts[c] = {t[0] + t[1] + early, t[2] - early + t[3], t[4] + t[5]};
  }
  return {"bdhs", std::move(file), std::move(scheme), std::move(reference), std::move(truth),
          std::move(aggregated)};
}

}  // namespace pcbayes::fixtures

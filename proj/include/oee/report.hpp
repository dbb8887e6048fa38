#pragma once

// Aggregation of execution records into ensemble statistics.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "oee/ensemble.hpp"
#include "oee/wolfram_class.hpp"

namespace oee {

/// Histogram of ratio = value / t_P over base-2 logarithmic bins: bin b holds
/// ratios in [2^b, 2^(b+1)). Zero ratios are counted separately.
struct LogHistogram {
  std::map<int, std::uint64_t> bins;
  std::uint64_t zeros = 0;
  std::uint64_t total() const;
  friend bool operator==(const LogHistogram&, const LogHistogram&) = default;
};

/// Tukey box statistics; whiskers reach the most extreme data within 1.5 IQR.
struct BoxStats {
  std::uint64_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;
  double mean = 0;
  friend bool operator==(const BoxStats&, const BoxStats&) = default;
};

/// Quartiles by linear interpolation between order statistics.
BoxStats box_stats(std::vector<double> values);

struct SpearmanResult {
  std::uint64_t n = 0;
  double rho = 0.0;
  double p_value = 1.0;  ///< two-sided, t-approximation with n - 2 degrees of freedom
  friend bool operator==(const SpearmanResult&, const SpearmanResult&) = default;
};

/// Ranks with ties given their mean rank (1-based).
std::vector<double> mid_ranks(std::span<const double> values);
/// Spearman rank correlation (Pearson correlation of mid-ranks).
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct MetagenomeEntry {
  int rank = 0;
  int rule = 0;
  std::uint64_t count = 0;
  double frequency = 0.0;
  WolframClass wolfram_class = WolframClass::I;
  friend bool operator==(const MetagenomeEntry&, const MetagenomeEntry&) = default;
};

struct Metagenome {
  std::vector<MetagenomeEntry> entries;            ///< by count descending, then rule ascending
  std::array<std::uint64_t, 4> class_counts{};     ///< index 0 = class I
  std::uint64_t total = 0;
  double class_fraction(WolframClass c) const;
  friend bool operator==(const Metagenome&, const Metagenome&) = default;
};

/// Rank-ordered attractor rule counts over the given records.
Metagenome metagenome(std::span<const ExecutionRecord> records, const ClassTable& classes, bool oee_only = false);

/// Joint counts of C (rows, 20 bins over [0, 1]) and k (columns, 20 bins over
/// [-1, 2]); out-of-range values are clamped into the edge bins.
struct HeatGrid {
  static constexpr std::size_t kBins = 20;
  static constexpr double kCMin = 0.0, kCMax = 1.0;
  static constexpr double kKMin = -1.0, kKMax = 2.0;
  std::array<std::array<std::uint64_t, kBins>, kBins> counts{};
  std::uint64_t total = 0;
  static std::size_t c_bin(double c);
  static std::size_t k_bin(double k);
  friend bool operator==(const HeatGrid&, const HeatGrid&) = default;
};

struct ComplexitySummary {
  std::uint64_t n_c = 0;
  std::optional<double> mean_C;
  std::uint64_t n_k = 0;        ///< non-extinct k values
  std::uint64_t n_extinct = 0;
  std::optional<double> mean_k;
  HeatGrid grid;                ///< records with both C and a finite k
  friend bool operator==(const ComplexitySummary&, const ComplexitySummary&) = default;
};

struct EnsembleReport {
  std::uint64_t records = 0;
  std::uint64_t censored = 0;
  std::uint64_t counted = 0;  ///< non-censored records: every percentage's denominator
  std::uint64_t oee = 0, inn = 0, ue = 0, attractor_ue = 0;
  double oee_percent = 0, inn_percent = 0, ue_percent = 0, attractor_ue_percent = 0;

  LogHistogram t_r_ratio;  ///< t_r / t_P
  LogHistogram t_a_ratio;  ///< t_a / t_P
  BoxStats t_r_box;        ///< of t_r / t_P
  BoxStats t_a_box;        ///< of t_a / t_P
  /// Exact t_r histogram (value -> count).
  std::map<std::uint64_t, std::uint64_t> t_r_counts;

  std::vector<std::pair<std::uint64_t, double>> innovation_vs_t_r;  ///< (t_r, I), record order after sorting
  SpearmanResult innovation_spearman;

  Metagenome metagenome_all;
  Metagenome metagenome_oee;

  ComplexitySummary complexity_all;
  ComplexitySummary complexity_oee;

  friend bool operator==(const EnsembleReport&, const EnsembleReport&) = default;
};

/// Mergeable collection of records. Records are kept and sorted on finalise,
/// so merging in any grouping or order yields the same report.
class ReportAccumulator {
 public:
  void add(const ExecutionRecord& record);
  void add(std::span<const ExecutionRecord> records);
  void merge(const ReportAccumulator& other);
  std::size_t size() const { return records_.size(); }

  /// Throws Error when there is no non-censored record.
  EnsembleReport finalize(const ClassTable& classes) const;

 private:
  std::vector<ExecutionRecord> records_;
};

EnsembleReport aggregate(std::span<const ExecutionRecord> records, const ClassTable& classes);

/// Total order on records used to make aggregation order-independent.
bool record_less(const ExecutionRecord& a, const ExecutionRecord& b);

}  // namespace oee

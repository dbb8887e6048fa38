#include "oee/report.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

namespace oee {

namespace {

auto record_key(const ExecutionRecord& r) {
  return std::make_tuple(static_cast<int>(r.variant), r.w_o, r.w_e, r.mu, r.init.r_o, r.init.r_e, r.init.s_o, r.init.s_e,
                         r.init.seed, r.censored, r.t_r, r.t_r_rule, r.t_a, r.inn, r.ue, r.n_rule_transitions, r.C, r.k,
                         r.k_extinct);
}

int floor_log2(std::uint64_t v) { return static_cast<int>(std::bit_width(v)) - 1; }

void add_ratio(LogHistogram& h, std::uint64_t value, std::uint64_t t_P) {
  if (value == 0) {
    ++h.zeros;
    return;
  }
  // t_P is a power of two, so floor(log2(value / t_P)) is an integer difference.
  ++h.bins[floor_log2(value) - floor_log2(t_P)];
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

ComplexitySummary summarize_complexity(std::span<const ExecutionRecord* const> records) {
  ComplexitySummary s;
  double sum_c = 0.0;
  double sum_k = 0.0;
  for (const ExecutionRecord* r : records) {
    if (r->C) {
      ++s.n_c;
      sum_c += *r->C;
    }
    if (r->k_extinct) ++s.n_extinct;
    if (r->k) {
      ++s.n_k;
      sum_k += *r->k;
    }
    if (r->C && r->k) {
      ++s.grid.counts[HeatGrid::c_bin(*r->C)][HeatGrid::k_bin(*r->k)];
      ++s.grid.total;
    }
  }
  if (s.n_c) s.mean_C = sum_c / static_cast<double>(s.n_c);
  if (s.n_k) s.mean_k = sum_k / static_cast<double>(s.n_k);
  return s;
}

std::size_t clamp_bin(double v, double lo, double hi) {
  if (!(v > lo)) return 0;
  const double x = (v - lo) / (hi - lo) * static_cast<double>(HeatGrid::kBins);
  return std::min(static_cast<std::size_t>(x), HeatGrid::kBins - 1);
}

}  // namespace

std::uint64_t LogHistogram::total() const {
  std::uint64_t n = zeros;
  for (const auto& [bin, count] : bins) n += count;
  return n;
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.n = values.size();
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = *std::lower_bound(values.begin(), values.end(), lo_fence);
  b.whisker_high = *(std::upper_bound(values.begin(), values.end(), hi_fence) - 1);
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return b;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman needs paired samples");
  SpearmanResult r;
  r.n = x.size();
  if (r.n < 3) return r;
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  const double mean = (static_cast<double>(r.n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return r;  // a constant variable has no rank correlation
  r.rho = sxy / std::sqrt(sxx * syy);
  if (std::abs(r.rho) >= 1.0) {
    r.p_value = 0.0;
    return r;
  }
  const double dof = static_cast<double>(r.n - 2);
  const double t = r.rho * std::sqrt(dof / (1.0 - r.rho * r.rho));
  const boost::math::students_t dist(dof);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return r;
}

double Metagenome::class_fraction(WolframClass c) const {
  if (total == 0) return 0.0;
  return static_cast<double>(class_counts[static_cast<int>(c) - 1]) / static_cast<double>(total);
}

Metagenome metagenome(std::span<const ExecutionRecord> records, const ClassTable& classes, bool oee_only) {
  std::array<std::uint64_t, 256> counts{};
  Metagenome m;
  for (const auto& r : records) {
    if (r.censored || (oee_only && !r.oee.value_or(false))) continue;
    for (const auto& [rule, count] : r.attractor_rules) {
      counts[rule] += count;
      m.total += count;
    }
  }
  for (int rule = 0; rule < 256; ++rule) {
    if (counts[rule] == 0) continue;
    MetagenomeEntry e;
    e.rule = rule;
    e.count = counts[rule];
    e.wolfram_class = classes[rule];
    e.frequency = static_cast<double>(e.count) / static_cast<double>(m.total);
    m.class_counts[static_cast<int>(e.wolfram_class) - 1] += e.count;
    m.entries.push_back(e);
  }
  std::stable_sort(m.entries.begin(), m.entries.end(),
                   [](const MetagenomeEntry& a, const MetagenomeEntry& b) { return a.count > b.count; });
  for (std::size_t i = 0; i < m.entries.size(); ++i) m.entries[i].rank = static_cast<int>(i) + 1;
  return m;
}

std::size_t HeatGrid::c_bin(double c) { return clamp_bin(c, kCMin, kCMax); }
std::size_t HeatGrid::k_bin(double k) { return clamp_bin(k, kKMin, kKMax); }

bool record_less(const ExecutionRecord& a, const ExecutionRecord& b) { return record_key(a) < record_key(b); }

void ReportAccumulator::add(const ExecutionRecord& record) { records_.push_back(record); }

void ReportAccumulator::add(std::span<const ExecutionRecord> records) {
  records_.insert(records_.end(), records.begin(), records.end());
}

void ReportAccumulator::merge(const ReportAccumulator& other) { add(other.records_); }

EnsembleReport ReportAccumulator::finalize(const ClassTable& classes) const {
  std::vector<ExecutionRecord> sorted = records_;
  std::stable_sort(sorted.begin(), sorted.end(), record_less);

  EnsembleReport rep;
  rep.records = sorted.size();
  std::vector<const ExecutionRecord*> live;
  std::vector<const ExecutionRecord*> oee;
  for (const auto& r : sorted) {
    if (r.censored) {
      ++rep.censored;
      continue;
    }
    live.push_back(&r);
    if (r.oee.value_or(false)) oee.push_back(&r);
  }
  if (live.empty()) throw Error("cannot build a report: every record is censored or the record set is empty");
  rep.counted = live.size();

  std::vector<double> tr_ratio, ta_ratio, innovation, recurrence;
  for (const ExecutionRecord* r : live) {
    rep.oee += r->oee.value_or(false);
    rep.inn += r->inn.value_or(false);
    rep.ue += r->ue.value_or(false);
    rep.attractor_ue += r->attractor_ue.value_or(false);
    add_ratio(rep.t_r_ratio, r->t_r, r->t_P);
    add_ratio(rep.t_a_ratio, r->t_a, r->t_P);
    ++rep.t_r_counts[r->t_r];
    tr_ratio.push_back(static_cast<double>(r->t_r) / static_cast<double>(r->t_P));
    ta_ratio.push_back(static_cast<double>(r->t_a) / static_cast<double>(r->t_P));
    innovation.push_back(r->innovation_I);
    recurrence.push_back(static_cast<double>(r->t_r));
    rep.innovation_vs_t_r.emplace_back(r->t_r, r->innovation_I);
  }
  const auto pct = [&](std::uint64_t k) { return 100.0 * static_cast<double>(k) / static_cast<double>(rep.counted); };
  rep.oee_percent = pct(rep.oee);
  rep.inn_percent = pct(rep.inn);
  rep.ue_percent = pct(rep.ue);
  rep.attractor_ue_percent = pct(rep.attractor_ue);
  rep.t_r_box = box_stats(std::move(tr_ratio));
  rep.t_a_box = box_stats(std::move(ta_ratio));
  rep.innovation_spearman = spearman(innovation, recurrence);
  rep.metagenome_all = metagenome(sorted, classes, false);
  rep.metagenome_oee = metagenome(sorted, classes, true);
  rep.complexity_all = summarize_complexity(live);
  rep.complexity_oee = summarize_complexity(oee);
  return rep;
}

EnsembleReport aggregate(std::span<const ExecutionRecord> records, const ClassTable& classes) {
  ReportAccumulator acc;
  acc.add(records);
  return acc.finalize(classes);
}

}  // namespace oee

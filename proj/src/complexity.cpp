#include "oee/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "oee/rng.hpp"

namespace oee {

std::string serialize_trajectory(std::span<const BitState> states) {
  if (states.empty()) throw std::invalid_argument("cannot serialise an empty trajectory");
  std::string out;
  out.reserve(states.size() * states.front().width());
  for (const auto& s : states) out += s.to_string();
  return out;
}

std::uint64_t trajectory_compressed_bits(std::span<const BitState> states) {
  if (states.empty()) throw std::invalid_argument("cannot compress an empty trajectory");
  LzwBitCounter counter;
  for (const auto& s : states) {
    for (unsigned p = 0; p < s.width(); ++p) counter.push(s.cell(p));
  }
  return counter.finish();
}

std::uint64_t NormParams::effective_steps() const {
  if (2 * width >= 64) return steps;
  return std::min(steps, std::uint64_t{1} << (2 * width));
}

std::uint64_t normalization_sample_bits(const NormParams& params, std::uint64_t index) {
  if (params.width < 1 || params.width > BitState::kMaxWidth) throw std::invalid_argument("normalisation width must be 1..64");
  CounterRng rng(params.seed, index);
  const RuleTable rule = RuleTable::from_bits(static_cast<std::uint8_t>(rng.next_below(256)));
  BitState s(rng.next_u64() & BitState::mask_for(params.width), params.width);
  LzwBitCounter counter;
  const std::uint64_t rows = params.effective_steps();
  for (std::uint64_t t = 0; t < rows; ++t) {
    for (unsigned p = 0; p < s.width(); ++p) counter.push(s.cell(p));
    s = step(rule, s);
  }
  return counter.finish();
}

std::uint64_t normalization_constant_serial(const NormParams& params) {
  if (params.samples == 0) throw std::invalid_argument("normalisation needs at least one sample");
  std::uint64_t best = 0;
  for (std::uint64_t i = 0; i < params.samples; ++i) best = std::max(best, normalization_sample_bits(params, i));
  return best;
}

std::uint64_t normalization_constant(const NormParams& params, int threads) {
  if (params.samples == 0) throw std::invalid_argument("normalisation needs at least one sample");
  if (params.width < 1 || params.width > BitState::kMaxWidth) throw std::invalid_argument("normalisation width must be 1..64");
  std::uint64_t best = 0;
  const auto n = static_cast<std::int64_t>(params.samples);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    best = std::max(best, normalization_sample_bits(params, static_cast<std::uint64_t>(i)));
  }
  return best;
}

NormCache::NormCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.empty() || !std::filesystem::exists(file_)) return;
  std::ifstream in(file_);
  if (!in) throw DataError("cannot open normalisation cache: " + file_.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    NormParams p;
    std::uint64_t bits = 0;
    std::string extra;
    if (!(fields >> p.width >> p.samples >> p.steps >> p.seed >> bits) || (fields >> extra))
      throw DataError(file_.string() + ":" + std::to_string(line_no) + ": expected '<w> <samples> <steps> <seed> <max_bits>'");
    values_[p] = bits;
  }
}

std::optional<std::uint64_t> NormCache::lookup(const NormParams& params) const {
  std::lock_guard lock(mutex_);
  if (auto it = values_.find(params); it != values_.end()) return it->second;
  return std::nullopt;
}

void NormCache::put(const NormParams& params, std::uint64_t max_bits) {
  std::lock_guard lock(mutex_);
  values_[params] = max_bits;
}

std::uint64_t NormCache::get(const NormParams& params, int threads) {
  if (auto hit = lookup(params)) return *hit;
  const std::uint64_t bits = normalization_constant(params, threads);
  put(params, bits);
  return bits;
}

void NormCache::save() const {
  if (file_.empty()) return;
  std::lock_guard lock(mutex_);
  const auto tmp = std::filesystem::path(file_.string() + ".tmp");
  {
    std::ofstream out(tmp);
    for (const auto& [p, bits] : values_) out << p.width << ' ' << p.samples << ' ' << p.steps << ' ' << p.seed << ' ' << bits << '\n';
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed writing normalisation cache: " + file_.string());
    }
  }
  std::filesystem::rename(tmp, file_);
}

double compressibility(std::span<const BitState> states, std::uint64_t norm_bits) {
  if (norm_bits == 0) throw std::invalid_argument("normalisation constant must be positive");
  return static_cast<double>(trajectory_compressed_bits(states)) / static_cast<double>(norm_bits);
}

double fit_growth_rate(std::span<const std::uint32_t> distances, unsigned saturation) {
  double sum_tl = 0.0;
  double sum_tt = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const std::uint32_t y = distances[i];
    if (y == 0) break;
    const double t = static_cast<double>(i + 1);
    sum_tl += t * std::log(static_cast<double>(y));
    sum_tt += t * t;
    if (y >= saturation) break;
  }
  return sum_tt > 0.0 ? sum_tl / sum_tt : 0.0;
}

LyapunovResult lyapunov(const VariantConfig& config, unsigned perturb_bit, std::uint64_t horizon) {
  if (horizon < 2) throw std::invalid_argument("Lyapunov horizon must be at least 2");
  if (perturb_bit >= config.w_o()) throw std::invalid_argument("perturbed cell lies outside the organism");
  config.validate();

  VariantConfig perturbed_config = config;
  perturbed_config.s_o = config.s_o.with_cell_flipped(perturb_bit);

  CounterRng rng_a(config.seed);
  CounterRng rng_b(config.seed);
  SystemSnapshot a = initial_snapshot(config);
  SystemSnapshot b = initial_snapshot(perturbed_config);

  LyapunovResult result;
  result.distances.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    a = system_step(config, a, rng_a);
    b = system_step(perturbed_config, b, rng_b);
    result.distances.push_back(static_cast<std::uint32_t>(hamming_distance(a.s_o, b.s_o)));
  }
  if (result.distances.front() == 0) {
    result.extinct = true;
    return result;
  }
  result.k = fit_growth_rate(result.distances, config.w_o());
  return result;
}

LyapunovResult lyapunov_all_positions(const VariantConfig& config, std::uint64_t horizon) {
  LyapunovResult mean;
  double total = 0.0;
  unsigned alive = 0;
  for (unsigned p = 0; p < config.w_o(); ++p) {
    LyapunovResult r = lyapunov(config, p, horizon);
    if (p == 0) mean.distances = r.distances;
    if (r.extinct) continue;
    total += r.k;
    ++alive;
  }
  mean.extinct = alive == 0;
  mean.k = alive ? total / alive : 0.0;
  return mean;
}

}  // namespace oee

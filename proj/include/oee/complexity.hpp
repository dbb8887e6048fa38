#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "oee/eca.hpp"
#include "oee/lzw.hpp"
#include "oee/variants.hpp"

namespace oee {

/// Row-major '0'/'1' string, one row per time step, no separators.
std::string serialize_trajectory(std::span<const BitState> states);

/// LZW cost of the serialised trajectory, without building the string.
std::uint64_t trajectory_compressed_bits(std::span<const BitState> states);

struct NormParams {
  unsigned width = 0;            ///< full-system width w_o + w_e
  std::uint64_t samples = 10'000;
  std::uint64_t steps = 65'536;  ///< further capped at 2^(2w)
  std::uint64_t seed = 1;

  std::uint64_t effective_steps() const;
  friend auto operator<=>(const NormParams&, const NormParams&) = default;
};

/// Largest LZW cost over `samples` random isolated ECA (uniform rule 0..255,
/// uniform initial state) of the given width, each serialised over
/// effective_steps() rows. OpenMP-parallel over samples.
std::uint64_t normalization_constant(const NormParams& params, int threads = 0);
/// Single-threaded reference for normalization_constant.
std::uint64_t normalization_constant_serial(const NormParams& params);
/// LZW cost of sample `index` alone.
std::uint64_t normalization_sample_bits(const NormParams& params, std::uint64_t index);

/// Memo of normalisation constants backed by an optional text file with lines
/// `<w> <samples> <steps> <seed> <max_bits>`.
class NormCache {
 public:
  NormCache() = default;
  explicit NormCache(std::filesystem::path file);

  std::uint64_t get(const NormParams& params, int threads = 0);
  std::optional<std::uint64_t> lookup(const NormParams& params) const;
  void put(const NormParams& params, std::uint64_t max_bits);

  /// Rewrites the backing file (no-op without one).
  void save() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<NormParams, std::uint64_t> values_;
};

/// Compressed bits of the trajectory over norm_bits.
double compressibility(std::span<const BitState> states, std::uint64_t norm_bits);

struct LyapunovResult {
  bool extinct = false;
  double k = 0.0;
  std::vector<std::uint32_t> distances;  ///< y(1) .. y(horizon)
};

/// Least-squares slope of ln y(t) = k t over t = 1, 2, ..., stopping at the
/// first t with y(t) = 0 (excluded) or y(t) = saturation (included).
double fit_growth_rate(std::span<const std::uint32_t> distances, unsigned saturation);

/// Runs the configuration and a copy with organism cell `perturb_bit` flipped
/// in lockstep: same environment, same random stream. Each copy re-derives its
/// own rule where the variant's update reads s_o.
LyapunovResult lyapunov(const VariantConfig& config, unsigned perturb_bit, std::uint64_t horizon);

/// Mean k over every perturbation position that does not go extinct; extinct
/// only when all positions do.
LyapunovResult lyapunov_all_positions(const VariantConfig& config, std::uint64_t horizon);

}  // namespace oee

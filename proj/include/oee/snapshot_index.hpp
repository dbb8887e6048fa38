#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oee/rng.hpp"
#include "oee/variants.hpp"

namespace oee {

/// Open-addressing map from a snapshot's evolving state to the time it was
/// first seen. clear() is O(1) through generation stamps so one index can be
/// reused across many trajectories.
class SnapshotIndex {
 public:
  SnapshotIndex() { slots_.resize(kInitialCapacity); }

  void clear() {
    ++generation_;
    size_ = 0;
    if (generation_ == 0) {
      for (auto& s : slots_) s.generation = 0;
      generation_ = 1;
    }
  }

  /// Returns the earlier time if the snapshot was already present; otherwise
  /// records it at time t.
  std::optional<std::uint64_t> find_or_insert(const SystemSnapshot& snap, std::uint64_t t) {
    if ((size_ + 1) * 2 > slots_.size()) grow();
    const Key key = key_of(snap);
    std::size_t i = hash(key) & (slots_.size() - 1);
    while (true) {
      Slot& s = slots_[i];
      if (s.generation != generation_) {
        s = Slot{key, t, generation_};
        ++size_;
        return std::nullopt;
      }
      if (s.key == key) return s.time;
      i = (i + 1) & (slots_.size() - 1);
    }
  }

  std::size_t size() const { return size_; }

 private:
  struct Key {
    std::uint64_t s_o = 0;
    std::uint64_t s_e = 0;
    std::uint8_t r_o = 0;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct Slot {
    Key key;
    std::uint64_t time = 0;
    std::uint32_t generation = 0;
  };

  static constexpr std::size_t kInitialCapacity = 256;

  static Key key_of(const SystemSnapshot& snap) {
    return Key{snap.s_o.value(), snap.s_e ? snap.s_e->value() : 0, snap.r_o.number()};
  }

  static std::uint64_t hash(const Key& k) {
    return CounterRng::mix(k.s_o * 0x9E3779B97F4A7C15ull ^ CounterRng::mix(k.s_e + k.r_o));
  }

  void grow() {
    std::vector<Slot> old;
    old.swap(slots_);
    slots_.assign(old.size() * 2, Slot{});
    const std::uint32_t g = generation_;
    generation_ = 1;
    size_ = 0;
    for (const Slot& s : old) {
      if (s.generation != g) continue;
      std::size_t i = hash(s.key) & (slots_.size() - 1);
      while (slots_[i].generation == generation_) i = (i + 1) & (slots_.size() - 1);
      slots_[i] = Slot{s.key, s.time, generation_};
      ++size_;
    }
  }

  std::vector<Slot> slots_;
  std::uint32_t generation_ = 1;
  std::size_t size_ = 0;
};

}  // namespace oee

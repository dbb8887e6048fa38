#include <algorithm>
#include <fstream>
#include <iterator>

#include "oee/innovation.hpp"

namespace oee {

namespace {

constexpr char kMagic[4] = {'O', 'E', 'E', 'C'};
constexpr std::uint8_t kFormatVersion = 1;

void put_u16(std::vector<char>& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

CounterfactualOracle CounterfactualOracle::build(unsigned width) {
  if (width < 1 || width > kMaxWidth) throw std::invalid_argument("counterfactual oracle supports widths 1..5");
  CounterfactualOracle oracle;
  oracle.width_ = width;
  const unsigned n_states = 1u << width;
  for (unsigned rule = 0; rule < 256; ++rule) {
    const RuleTable table = RuleTable::from_bits(static_cast<std::uint8_t>(rule));
    for (unsigned init = 0; init < n_states; ++init) {
      Record rec;
      rec.rule = static_cast<std::uint8_t>(rule);
      rec.initial_state = static_cast<std::uint8_t>(init);
      std::vector<int> first_seen(n_states, -1);
      BitState s(init, width);
      while (first_seen[s.value()] < 0) {
        first_seen[s.value()] = static_cast<int>(rec.states.size());
        rec.states.push_back(static_cast<std::uint8_t>(s.value()));
        s = step(table, s);
      }
      rec.cycle_start = static_cast<std::size_t>(first_seen[s.value()]);
      rec.states.push_back(static_cast<std::uint8_t>(s.value()));
      oracle.records_.push_back(std::move(rec));
    }
  }
  oracle.index_positions();
  return oracle;
}

void CounterfactualOracle::index_positions() {
  positions_.assign(std::size_t{1} << width_, {});
  for (std::uint32_t r = 0; r < records_.size(); ++r) {
    const auto& states = records_[r].states;
    for (std::uint32_t i = 0; i + 1 < states.size(); ++i) positions_[states[i]].emplace_back(r, i);
  }
}

bool CounterfactualOracle::contains(std::span<const BitState> window) const {
  if (window.empty()) return true;
  for (const auto& s : window) {
    if (s.width() != width_) throw std::invalid_argument("window width differs from oracle width");
  }
  for (auto [r, offset] : positions_[window.front().value()]) {
    const Record& rec = records_[r];
    const std::size_t end = rec.states.size() - 1;  // index of the repeated state
    const std::size_t period = end - rec.cycle_start;
    bool match = true;
    for (std::size_t j = 1; j < window.size() && match; ++j) {
      std::size_t i = offset + j;
      if (i >= end) i = rec.cycle_start + (i - rec.cycle_start) % period;
      match = rec.states[i] == window[j].value();
    }
    if (match) return true;
  }
  return false;
}

void CounterfactualOracle::save(const std::filesystem::path& path) const {
  std::vector<char> bytes(std::begin(kMagic), std::end(kMagic));
  bytes.push_back(static_cast<char>(kFormatVersion));
  bytes.push_back(static_cast<char>(width_));
  for (const Record& rec : records_) {
    put_u32(bytes, static_cast<std::uint32_t>(4 + rec.states.size()));
    bytes.push_back(static_cast<char>(rec.rule));
    bytes.push_back(static_cast<char>(rec.initial_state));
    put_u16(bytes, static_cast<std::uint16_t>(rec.states.size()));
    for (auto s : rec.states) bytes.push_back(static_cast<char>(s));
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed writing oracle cache: " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

CounterfactualOracle CounterfactualOracle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open oracle cache: " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) { return DataError("malformed oracle cache " + path.string() + ": " + why); };
  if (bytes.size() < 6 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                                      [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; }))
    throw fail("bad magic");
  if (bytes[4] != kFormatVersion) throw fail("unsupported version " + std::to_string(bytes[4]));
  CounterfactualOracle oracle;
  oracle.width_ = bytes[5];
  if (oracle.width_ < 1 || oracle.width_ > kMaxWidth) throw fail("bad width");
  std::size_t pos = 6;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 8) throw fail("truncated record header");
    const std::uint32_t len = bytes[pos] | (bytes[pos + 1] << 8) | (bytes[pos + 2] << 16) |
                              (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
    pos += 4;
    if (len < 4 || bytes.size() - pos < len) throw fail("truncated record");
    Record rec;
    rec.rule = bytes[pos];
    rec.initial_state = bytes[pos + 1];
    const std::size_t n = bytes[pos + 2] | (bytes[pos + 3] << 8);
    if (n + 4 != len || n < 2) throw fail("record length mismatch");
    rec.states.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4),
                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4 + n));
    const auto last = rec.states.back();
    const auto it = std::find(rec.states.begin(), rec.states.end() - 1, last);
    if (it == rec.states.end() - 1) throw fail("record does not end on a repeated state");
    rec.cycle_start = static_cast<std::size_t>(it - rec.states.begin());
    for (auto s : rec.states) {
      if (s >= (1u << oracle.width_)) throw fail("state exceeds width");
    }
    oracle.records_.push_back(std::move(rec));
    pos += len;
  }
  if (oracle.records_.size() != 256u << oracle.width_) throw fail("unexpected record count");
  oracle.index_positions();
  return oracle;
}

CounterfactualOracle CounterfactualOracle::load_or_build(const std::filesystem::path& path, unsigned width) {
  if (std::filesystem::exists(path)) {
    try {
      CounterfactualOracle cached = load(path);
      if (cached.width() == width) return cached;
    } catch (const DataError&) {
      // stale or corrupt cache: rebuilt below
    }
  }
  CounterfactualOracle built = build(width);
  built.save(path);
  return built;
}

bool CounterfactualOracle::records_equal(const CounterfactualOracle& other) const {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const Record& a = records_[i];
    const Record& b = other.records_[i];
    if (a.rule != b.rule || a.initial_state != b.initial_state || a.states != b.states || a.cycle_start != b.cycle_start)
      return false;
  }
  return true;
}

}  // namespace oee

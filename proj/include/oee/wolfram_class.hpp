#pragma once

#include <array>
#include <filesystem>
#include <string_view>

#include "oee/eca.hpp"

namespace oee {

enum class WolframClass : std::uint8_t { I = 1, II = 2, III = 3, IV = 4 };

std::string_view to_string(WolframClass c);

/// Class assignment for all 256 rules.
class ClassTable {
 public:
  /// Classes of the 88 orbit representatives propagated over each orbit.
  static const ClassTable& builtin();

  /// Reads `<rule> <class>` lines; '#' starts a comment. All 256 rules must
  /// appear exactly once, in increasing order, and be constant on each orbit.
  static ClassTable load(const std::filesystem::path& path);

  WolframClass operator[](int rule) const;

  /// Writes the 256-line data file format.
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const ClassTable&, const ClassTable&) = default;

 private:
  std::array<WolframClass, 256> classes_{};
};

/// Class of a rule according to the built-in table.
WolframClass wolfram_class(int rule);

}  // namespace oee

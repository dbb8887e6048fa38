#include "oee/wolfram_class.hpp"

#include <fstream>
#include <sstream>
#include <utility>

namespace oee {

namespace {

// Orbit representatives grouped by class, after the ECA classification in
// Wolfram's NKS (2002) as tabulated in the Wolfram Atlas.
constexpr std::array<int, 8> kClassOne = {0, 8, 32, 40, 128, 136, 160, 168};
constexpr std::array<int, 11> kClassThree = {18, 22, 30, 45, 60, 90, 105, 122, 126, 146, 150};
constexpr std::array<int, 4> kClassFour = {41, 54, 106, 110};

}  // namespace

std::string_view to_string(WolframClass c) {
  switch (c) {
    case WolframClass::I: return "I";
    case WolframClass::II: return "II";
    case WolframClass::III: return "III";
    case WolframClass::IV: return "IV";
  }
  return "?";
}

const ClassTable& ClassTable::builtin() {
  static const ClassTable table = [] {
    std::array<WolframClass, 256> by_rep{};
    for (auto& c : by_rep) c = WolframClass::II;
    for (int r : kClassOne) by_rep[r] = WolframClass::I;
    for (int r : kClassThree) by_rep[r] = WolframClass::III;
    for (int r : kClassFour) by_rep[r] = WolframClass::IV;
    ClassTable t;
    for (int n = 0; n < 256; ++n) t.classes_[n] = by_rep[canonical_rule(n)];
    return t;
  }();
  return table;
}

ClassTable ClassTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open class table: " + path.string());
  ClassTable t;
  int expected = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int rule = 0, cls = 0;
    if (!(fields >> rule)) continue;
    std::string extra;
    if (!(fields >> cls) || (fields >> extra) || cls < 1 || cls > 4)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected '<rule> <class 1..4>'");
    if (rule != expected)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected rule " + std::to_string(expected));
    t.classes_[rule] = static_cast<WolframClass>(cls);
    ++expected;
  }
  if (expected != 256) throw DataError(path.string() + ": class table covers " + std::to_string(expected) + " of 256 rules");
  for (int n = 0; n < 256; ++n) {
    if (t.classes_[n] != t.classes_[canonical_rule(n)])
      throw DataError(path.string() + ": class of rule " + std::to_string(n) + " differs from its orbit representative");
  }
  return t;
}

WolframClass ClassTable::operator[](int rule) const {
  if (rule < 0 || rule > 255) throw std::invalid_argument("rule number out of range 0..255");
  return classes_[rule];
}

void ClassTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write class table: " + path.string());
  for (int n = 0; n < 256; ++n) out << n << ' ' << static_cast<int>(classes_[n]) << '\n';
  if (!out) throw Error("failed writing class table: " + path.string());
}

WolframClass wolfram_class(int rule) { return ClassTable::builtin()[rule]; }

}  // namespace oee

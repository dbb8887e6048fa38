#include "oee/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace oee {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string hex(std::uint64_t v) {
  char buf[24] = {'0', 'x'};
  auto [end, ec] = std::to_chars(buf + 2, buf + sizeof buf, v, 16);
  return std::string(buf, end);
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "1" : "0") : ""; }

template <class T>
std::string opt_num(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

// Field-level parsing; messages are completed with file and line by the caller.
class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_u64(std::string_view s, int base = 10) {
  if (base == 16 && (s.starts_with("0x") || s.starts_with("0X"))) s.remove_prefix(2);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw FieldError("expected an unsigned integer, got '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw FieldError("expected a number, got '" + std::string(s) + "'");
  return v;
}

std::optional<bool> parse_flag(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "1") return true;
  if (s == "0") return false;
  throw FieldError("expected 0, 1 or empty, got '" + std::string(s) + "'");
}

std::uint8_t parse_rule(std::string_view s) {
  const std::uint64_t v = parse_u64(s);
  if (v > 255) throw FieldError("rule number out of range: " + std::string(s));
  return static_cast<std::uint8_t>(v);
}

ExecutionRecord parse_record(const std::vector<std::string_view>& f) {
  ExecutionRecord r;
  try {
    r.variant = parse_variant(f[0]);
  } catch (const std::invalid_argument& e) {
    throw FieldError(e.what());
  }
  r.w_o = static_cast<unsigned>(parse_u64(f[1]));
  r.w_e = static_cast<unsigned>(parse_u64(f[2]));
  if (r.w_o < 3 || r.w_o > 64 || r.w_e > 64) throw FieldError("width out of range");
  if (has_environment(r.variant) != (r.w_e > 0)) throw FieldError("environment width does not fit the variant");
  r.mu = f[3].empty() ? 0.0 : parse_double(f[3]);
  r.init.seed = f[4].empty() ? 0 : parse_u64(f[4]);
  r.init.r_o = parse_rule(f[5]);
  r.init.r_e = f[6].empty() ? 0 : parse_rule(f[6]);
  r.init.s_o = parse_u64(f[7], 16);
  r.init.s_e = f[8].empty() ? 0 : parse_u64(f[8], 16);
  if ((r.init.s_o & ~BitState::mask_for(r.w_o)) || (r.w_e && (r.init.s_e & ~BitState::mask_for(r.w_e))))
    throw FieldError("state has bits beyond its width");
  r.t_P = parse_u64(f[9]);
  r.t_r = parse_u64(f[10]);
  r.t_r_rule = parse_u64(f[11]);
  r.t_a = parse_u64(f[12]);
  r.inn = parse_flag(f[13]);
  r.ue = parse_flag(f[14]);
  r.oee = parse_flag(f[15]);
  r.attractor_ue = parse_flag(f[16]);
  r.n_rule_transitions = parse_u64(f[17]);
  r.innovation_I = parse_double(f[18]);
  if (!f[19].empty()) r.compressed_bits = parse_u64(f[19]);
  if (!f[20].empty()) r.norm_bits = parse_u64(f[20]);
  if (!f[21].empty()) r.C = parse_double(f[21]);
  if (f[22] == "extinct") {
    r.k_extinct = true;
  } else if (!f[22].empty()) {
    r.k = parse_double(f[22]);
  }
  const auto censored = parse_flag(f[23]);
  if (!censored) throw FieldError("censored flag must be 0 or 1");
  r.censored = *censored;
  if (r.oee && (*r.oee != (r.inn.value_or(false) && r.ue.value_or(false))))
    throw FieldError("oee flag is inconsistent with inn and ue");
  return r;
}

// Published sizes of the sampled spaces, keyed by (variant, w_o, w_e).
const std::map<std::tuple<Variant, unsigned, unsigned>, double>& published_space_sizes() {
  static const std::map<std::tuple<Variant, unsigned, unsigned>, double> table = [] {
    std::map<std::tuple<Variant, unsigned, unsigned>, double> t;
    const std::pair<WidthRatio, std::array<double, 5>> case1[] = {
        {{1, 2}, {2.1e6, 4.19e6, 1.68e7, 3.36e7, 1.34e8}},
        {{1, 1}, {4.19e6, 1.68e7, 6.71e7, 2.68e8, 1.07e9}},
        {{3, 2}, {8.34e6, 6.71e7, 2.68e8, 2.15e9, 8.59e9}},
        {{2, 1}, {3.36e7, 2.68e8, 2.15e9, 1.72e10, 1.37e11}},
        {{5, 2}, {6.71e7, 1.074e9, 8.59e8, 1.37e11, 1.1e12}},
    };
    for (const auto& [ratio, sizes] : case1) {
      for (unsigned w = 3; w <= 7; ++w) t[{Variant::CaseI, w, ratio.apply(w)}] = sizes[w - 3];
    }
    const double case2[] = {1.34e8, 2.68e8, 5.37e8, 1.07e9, 2.15e9};
    const double case3[] = {5.24e5, 1.05e6, 2.1e6, 4.19e6, 8.39e6};
    for (unsigned w = 3; w <= 7; ++w) {
      t[{Variant::CaseII, w, kCaseTwoEnvWidth}] = case2[w - 3];
      t[{Variant::CaseIII, w, 0}] = case3[w - 3];
    }
    return t;
  }();
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::logic_error("double formatting failed");
  return std::string(buf, end);
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer, bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".partial";
  auto discard = [&] {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
  };
  try {
    {
      std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
      if (!out) throw Error("cannot open " + tmp.string() + " for writing");
      writer(out);
      out.flush();
      if (!out) throw Error("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    discard();
    throw;
  }
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "variant",     "w_o",      "w_e",          "mu",           "seed",
      "init_rule_o", "rule_e",   "init_state_o", "init_state_e", "t_P",
      "t_r",         "t_r_rule", "t_a",          "inn",          "ue",
      "oee",         "attractor_ue", "n_rule_transitions", "innovation_I", "compressed_bits",
      "norm_bits",   "C",        "k",            "censored"};
  return cols;
}

void write_records_csv(std::ostream& out, std::span<const ExecutionRecord> records, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    const bool env = has_environment(r.variant);
    const bool stochastic = r.variant == Variant::CaseIII;
    out << to_string(r.variant) << ',' << r.w_o << ',' << r.w_e << ',' << (stochastic ? format_double(r.mu) : "") << ','
        << (stochastic ? std::to_string(r.init.seed) : "") << ',' << int{r.init.r_o} << ','
        << (env ? std::to_string(r.init.r_e) : "") << ',' << hex(r.init.s_o) << ',' << (env ? hex(r.init.s_e) : "") << ','
        << r.t_P << ',' << r.t_r << ',' << r.t_r_rule << ',' << r.t_a << ',' << flag(r.inn) << ',' << flag(r.ue) << ','
        << flag(r.oee) << ',' << flag(r.attractor_ue) << ',' << r.n_rule_transitions << ','
        << format_double(r.innovation_I) << ',' << opt_num(r.compressed_bits) << ',' << opt_num(r.norm_bits) << ','
        << opt_num(r.C) << ',' << (r.k_extinct ? std::string("extinct") : opt_num(r.k)) << ',' << (r.censored ? 1 : 0)
        << '\n';
  }
}

std::string records_csv_string(std::span<const ExecutionRecord> records, const Metadata& metadata) {
  std::ostringstream out;
  write_records_csv(out, records, metadata);
  return out.str();
}

void write_records_csv(const std::filesystem::path& path, std::span<const ExecutionRecord> records,
                       const Metadata& metadata) {
  write_file_atomic(path, [&](std::ostream& out) { write_records_csv(out, records, metadata); });
}

RecordsFile read_records_csv(std::istream& in, const std::string& source_name) {
  RecordsFile file;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  const auto& cols = csv_columns();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) { return DataError(source_name + ":" + std::to_string(line_no) + ": " + msg); };
    if (line.front() == '#') {
      if (header_seen) throw fail("metadata line after the header");
      const std::string body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw fail("metadata line without '='");
      file.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != cols.size()) throw fail("header has " + std::to_string(fields.size()) + " columns, expected " +
                                                   std::to_string(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (fields[i] != cols[i]) throw fail("unexpected column '" + std::string(fields[i]) + "', expected '" + cols[i] + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != cols.size())
      throw fail("row has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(cols.size()));
    try {
      file.records.push_back(parse_record(fields));
    } catch (const FieldError& e) {
      throw fail(e.what());
    }
  }
  if (!header_seen) throw DataError(source_name + ": missing CSV header");
  return file;
}

RecordsFile read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file: " + path.string());
  return read_records_csv(in, path.string());
}

Json sample_space_json(Variant variant, unsigned w_o, unsigned w_e) {
  Json j;
  j["implemented"] = sample_space_size(variant, w_o, w_e);
  j["implemented_formula"] = has_environment(variant) ? "88^2 * 2^w_o * 2^w_e" : "88 * 2^w_o";
  const auto& published = published_space_sizes();
  if (auto it = published.find({variant, w_o, w_e}); it != published.end()) {
    j["published"] = it->second;
  } else {
    j["published"] = nullptr;
  }
  return j;
}

Json errata_json() {
  Json notes = Json::array();
  notes.push_back(
      "sample space: the printed count 88^2 * 2^(8 w_e) * 2^(8 w_o) does not match state spaces of size 2^w; "
      "88^2 * 2^w_o * 2^w_e is used, and the published subspace sizes are echoed alongside for comparison");
  notes.push_back(
      "compressibility: the printed normaliser max(C_i(s), length(s)) is replaced by the described procedure, the "
      "maximum LZW size over random fixed-rule ECA of the full-system width");
  notes.push_back("case3: an output bit flips when its uniform draw xi satisfies xi < mu");
  notes.push_back("case1: fractional environment widths ratio * w_o are rounded down");
  notes.push_back(
      "case1: with periodic triplet counts no state pair flips triplet 101 alone, so the one-step change from rule 30 "
      "to rule 62 is unreachable; cyclic counts satisfy n(101) = n(010) + n(011) - n(001), n(100) = n(001) and "
      "n(110) = n(011), which forces a second present triplet to flip");
  return notes;
}

namespace {

Json histogram_json(const LogHistogram& h) {
  Json bins = Json::array();
  for (const auto& [b, count] : h.bins) bins.push_back(Json{{"log2_lower", b}, {"count", count}});
  return Json{{"zeros", h.zeros}, {"bins", bins}, {"total", h.total()}};
}

Json box_json(const BoxStats& b) {
  return Json{{"n", b.n},           {"min", b.min},         {"q1", b.q1},
              {"median", b.median}, {"q3", b.q3},           {"max", b.max},
              {"whisker_low", b.whisker_low}, {"whisker_high", b.whisker_high}, {"mean", b.mean}};
}

Json metagenome_json(const Metagenome& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    entries.push_back(Json{{"rank", e.rank},
                           {"rule", e.rule},
                           {"count", e.count},
                           {"frequency", e.frequency},
                           {"class", std::string(to_string(e.wolfram_class))}});
  }
  Json classes;
  for (WolframClass c : {WolframClass::I, WolframClass::II, WolframClass::III, WolframClass::IV})
    classes[std::string(to_string(c))] = m.class_counts[static_cast<int>(c) - 1];
  return Json{{"total", m.total}, {"class_counts", classes}, {"entries", entries}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json complexity_json(const ComplexitySummary& s) {
  Json grid = Json::array();
  for (const auto& row : s.grid.counts) grid.push_back(row);
  return Json{{"n_C", s.n_c},
              {"mean_C", optional_json(s.mean_C)},
              {"n_k", s.n_k},
              {"n_extinct", s.n_extinct},
              {"mean_k", optional_json(s.mean_k)},
              {"heat_grid",
               Json{{"C_range", {HeatGrid::kCMin, HeatGrid::kCMax}},
                    {"k_range", {HeatGrid::kKMin, HeatGrid::kKMax}},
                    {"bins", HeatGrid::kBins},
                    {"total", s.grid.total},
                    {"counts_C_by_k", grid}}}};
}

}  // namespace

Json report_to_json(const EnsembleReport& r, const Json& metadata) {
  Json j;
  j["metadata"] = metadata;
  j["records"] = r.records;
  j["censored"] = r.censored;
  j["counted"] = r.counted;
  j["oee_count"] = r.oee;
  j["inn_count"] = r.inn;
  j["ue_count"] = r.ue;
  j["attractor_ue_count"] = r.attractor_ue;
  j["oee_percent"] = r.oee_percent;
  j["inn_percent"] = r.inn_percent;
  j["ue_percent"] = r.ue_percent;
  j["attractor_ue_percent"] = r.attractor_ue_percent;
  j["t_r_over_t_P_histogram"] = histogram_json(r.t_r_ratio);
  j["t_a_over_t_P_histogram"] = histogram_json(r.t_a_ratio);
  j["t_r_over_t_P_box"] = box_json(r.t_r_box);
  j["t_a_over_t_P_box"] = box_json(r.t_a_box);
  Json tr = Json::array();
  for (const auto& [t, n] : r.t_r_counts) tr.push_back(Json::array({t, n}));
  j["t_r_counts"] = tr;
  j["innovation_vs_t_r_spearman"] =
      Json{{"n", r.innovation_spearman.n}, {"rho", r.innovation_spearman.rho}, {"p_value", r.innovation_spearman.p_value}};
  j["metagenome_all"] = metagenome_json(r.metagenome_all);
  j["metagenome_oee"] = metagenome_json(r.metagenome_oee);
  j["complexity_all"] = complexity_json(r.complexity_all);
  j["complexity_oee"] = complexity_json(r.complexity_oee);
  return j;
}

void write_report_json(const std::filesystem::path& path, const EnsembleReport& report, const Json& metadata) {
  const std::string text = report_to_json(report, metadata).dump(2) + "\n";
  write_file_atomic(path, [&](std::ostream& out) { out << text; });
}

void write_pgm(std::ostream& out, const std::vector<WideState>& rows, const std::string& comment) {
  if (rows.empty()) throw std::invalid_argument("an image needs at least one row");
  const std::size_t width = rows.front().size();
  out << "P5\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  out << width << ' ' << rows.size() << "\n255\n";
  std::string buf(width, '\0');
  for (const auto& row : rows) {
    if (row.size() != width) throw std::invalid_argument("image rows differ in width");
    for (std::size_t i = 0; i < width; ++i) buf[i] = row[i] ? static_cast<char>(255) : static_cast<char>(0);
    out.write(buf.data(), static_cast<std::streamsize>(width));
  }
}

void write_pgm(const std::filesystem::path& path, const std::vector<WideState>& rows, const std::string& comment) {
  write_file_atomic(path, [&](std::ostream& out) { write_pgm(out, rows, comment); }, true);
}

std::vector<WideState> to_rows(std::span<const BitState> states) {
  std::vector<WideState> rows;
  rows.reserve(states.size());
  for (const auto& s : states) rows.push_back(to_wide(s));
  return rows;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace oee

#pragma once

// File emitters and readers: records CSV, report JSON, PGM images, flat
// key=value config files, and atomic file replacement.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oee/ensemble.hpp"
#include "oee/report.hpp"

namespace oee {

inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;
/// Ordered key/value pairs echoed as `# key=value` lines at the top of a CSV.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Writes through a temporary sibling file renamed into place; the temporary
/// is removed if `writer` throws or the stream fails.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer,
                       bool binary = false);

/// Column names, in file order.
const std::vector<std::string>& csv_columns();

void write_records_csv(std::ostream& out, std::span<const ExecutionRecord> records, const Metadata& metadata = {});
std::string records_csv_string(std::span<const ExecutionRecord> records, const Metadata& metadata = {});
void write_records_csv(const std::filesystem::path& path, std::span<const ExecutionRecord> records,
                       const Metadata& metadata = {});

struct RecordsFile {
  Metadata metadata;
  std::vector<ExecutionRecord> records;
};

/// Parses a records CSV; throws DataError with a line number on malformed input.
RecordsFile read_records_csv(std::istream& in, const std::string& source_name = "<stream>");
RecordsFile read_records_csv(const std::filesystem::path& path);

/// Size of the initial-tuple space as implemented plus, where known, the size
/// stated by the original study for the same configuration.
Json sample_space_json(Variant variant, unsigned w_o, unsigned w_e);

/// Notes on formulas whose printed form disagrees with the implemented procedure.
Json errata_json();

Json report_to_json(const EnsembleReport& report, const Json& metadata);
void write_report_json(const std::filesystem::path& path, const EnsembleReport& report, const Json& metadata);

/// Binary greyscale image, one pixel per cell: 0 (white) for dead, 255 (black)
/// for live cells; one row per time step.
void write_pgm(std::ostream& out, const std::vector<WideState>& rows, const std::string& comment = {});
void write_pgm(const std::filesystem::path& path, const std::vector<WideState>& rows, const std::string& comment = {});
std::vector<WideState> to_rows(std::span<const BitState> states);

/// Flat `key = value` lines; '#' starts a comment. Throws DataError on lines
/// without '=' or with an empty key.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace oee

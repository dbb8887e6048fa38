#pragma once

namespace oee {

/// Entry point of the `oee` command-line tool. Returns 0 on success, 2 on a
/// usage error and 3 on a data or format error; diagnostics go to stderr.
int cli_main(int argc, const char* const* argv);

}  // namespace oee

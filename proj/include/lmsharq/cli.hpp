#pragma once

#include <iosfwd>

namespace lmsharq {

/// Entry point of the `lmsharq` tool. Subcommands: mi-table, calibrate,
/// channel, run, sweep, figures. Returns 0 on success; 2 for usage errors,
/// 3 for configuration errors, 4 for data errors, 1 otherwise.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lmsharq

#pragma once

namespace hetrain::cli {

/// Full command-line entry point; returns the process exit code.
/// 0 success, 1 usage, 2 data/format, 3 protocol/timeout, 4 level budget.
int cli_main(int argc, const char* const* argv);

} // namespace hetrain::cli

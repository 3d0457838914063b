#pragma once

namespace cbl {

/// Entry point behind the cblbench binary; exposed so tests can drive the
/// CLI in-process. Returns the process exit status: 0 on success, 1 on
/// domain/runtime errors, 2 on usage errors.
int cli_main(int argc, const char* const* argv);

} // namespace cbl

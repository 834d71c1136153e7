#pragma once

namespace gbart {

/// Entry point of the command-line tool. Returns 0 on success, 1 on a usage
/// error and 2 on a data or compute error.
int cli_main(int argc, const char* const* argv);

}  // namespace gbart

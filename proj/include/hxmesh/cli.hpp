#pragma once

#include <iosfwd>

namespace hxmesh {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitFile = 3,
  kExitParse = 4,
  kExitModule = 5,
};

// Artifacts go to stdout unless --out names a directory (default: the
// HXMESH_OUT environment variable). Errors are one JSON line on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hxmesh

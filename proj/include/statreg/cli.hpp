#pragma once

namespace statreg {

/// Command-line front end. Returns 0 on success, 2 on configuration errors and 3 on
/// numerical failures.
int cli_main(int argc, char** argv);

}  // namespace statreg

#ifndef ISOPOWER_CLI_HPP
#define ISOPOWER_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace isopower::cli {

// Runs one CLI invocation. Returns the process exit status: 0 on success,
// 1 on a domain error (a single machine-readable JSON error object is
// written to out), 2 on a bound violation.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

} // namespace isopower::cli

#endif

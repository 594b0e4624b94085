#ifndef KHOP_TOOLS_CLI_H_
#define KHOP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace khop::cli {

// Runs one `khop` invocation. args excludes the program name. Reports go to
// out, logs and errors to err. Returns 0 on success, 1 on a runtime failure
// and 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace khop::cli

#endif  // KHOP_TOOLS_CLI_H_

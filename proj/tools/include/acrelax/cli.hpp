#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acrelax {

/// Exit codes: 0 success, 1 configuration or parse error (usage printed on
/// `err`), 2 solver failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace acrelax

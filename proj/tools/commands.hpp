#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qc::cli {

enum Exit : int { pass = 0, check_fail = 1, usage = 2, numerical = 3 };

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qc::cli

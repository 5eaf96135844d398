// Command-line front end. Reports are JSON on stdout (or -o), summaries and
// usage errors go to stderr. Exit status: 0 holds/finished/not found,
// 1 fails/violation/refuted/inconclusive, 2 usage or input error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rwsos::cli {

inline constexpr int kSchemaVersion = 1;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwsos::cli

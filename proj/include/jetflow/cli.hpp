#pragma once
// Command-line front end. run() is the whole program minus process setup,
// taking argv-style arguments (program name excluded) and the two output
// streams, so tests can drive it in-process and compare bytes.
//
// Exit codes: 0 success, 1 a verification battery reported failures,
// 2 usage errors, 3 runtime errors (domain, quadrature, integration).

#include <iosfwd>
#include <string>
#include <vector>

namespace jetflow::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace jetflow::cli

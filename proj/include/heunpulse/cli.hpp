#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heunpulse/complex_math.hpp"

namespace heunpulse::cli {

/// Bad flag values; reported with usage text and exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real number, optionally a fraction "p/q". Throws UsageError.
double parse_real(std::string_view text);

/// "re,im", a real number, or an imaginary / mixed literal such as "i", "-i", "2i",
/// "1/2+i", "1-3i/2". Throws UsageError.
cplx parse_complex(std::string_view text);

/// Runs the command line. argv[0] is the program name. Exit codes: 0 success,
/// 1 module error or failed verification, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heunpulse::cli

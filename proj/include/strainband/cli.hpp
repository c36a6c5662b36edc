#ifndef STRAINBAND_CLI_HPP
#define STRAINBAND_CLI_HPP

#include <string>
#include <vector>

#include "strainband/deformation.hpp"

namespace strainband {

// Command-line front end.  Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.
int cli_run(int argc, const char* const* argv);
int cli_run(const std::vector<std::string>& args);  // args without argv[0]

// Shared formatting of doubles for CSV output (17 significant digits).
std::string fmt17(double v);

// Deformation selection by name: none, quad-ac, quad-zz, triaxial,
// reg-ac:L=<v>,w=<v>, csv:<path>.
DisplacementField parse_deformation(const std::string& name);

}  // namespace strainband

#endif

#pragma once

#include <iosfwd>

namespace otb {

// Entry point of the otbounds command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otb

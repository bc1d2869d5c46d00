#pragma once

#include <iosfwd>

namespace bsvem::cli {

// Entry point of the bsvem tool. Returns 0 on success, 1 on I/O or runtime
// failure, 2 when a parameter or mesh fails validation.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bsvem::cli

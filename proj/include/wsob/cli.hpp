#pragma once

#include <iosfwd>

namespace wsob {

/// Command line entry: radius | cover | embed | gaffney | curvature | kato.
/// Returns 0 when every assertion passes, 1 on a failed assertion or a
/// numerical failure (report still written), 2 on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wsob

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "unireg/harness.hpp"

namespace unireg {

/// Three stacked panels: r and x against t, u against t, and the
/// episode-end K and N against episode number.
void write_session_svg(std::ostream& out, const std::vector<EpisodeLog>& logs,
                       const std::string& title);

}  // namespace unireg

#pragma once

#include <string>

#include "cobord/site.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(COBORD_FIXTURE_DIR) + "/" + name; }

inline cobord::Site load(const std::string& name) { return cobord::load_site(fixture(name)); }

}  // namespace testing

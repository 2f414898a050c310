#pragma once

#include "imexrk/tableau_io.hpp"

#include <string>

namespace imexrk::testing {

inline std::string data_path(const std::string& rel) { return std::string(IMEXRK_DATA_DIR) + "/" + rel; }

inline ButcherPaird fixture(const std::string& name) { return read_tableau_file(data_path("tableaux/" + name + ".tab")); }

}  // namespace imexrk::testing

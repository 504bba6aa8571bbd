#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cfkit::data {

// Data files under data/, keyed by path relative to that directory
// (e.g. "templates/if_else_train.json"). Baked in at build time.
const std::map<std::string, std::string_view, std::less<>>& embedded_files();

// Throws std::out_of_range if the path is unknown.
std::string_view embedded_file(std::string_view relative_path);

}  // namespace cfkit::data

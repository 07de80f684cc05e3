#pragma once

#include <string>
#include <string_view>

namespace odmds {

// Porter (1980) suffix-stripping stemmer, original rule set. Expects a
// lowercase ASCII word; other input is returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace odmds

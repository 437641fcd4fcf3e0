#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smemsynth {

// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);

// Shortest text that reads back to the same double.
std::string format_number(double v);

} // namespace smemsynth

#pragma once

#include <cstddef>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mekb::tsv {

// Backslash escaping for tab, newline, carriage return and backslash.
std::string escape(std::string_view field);
std::string unescape(std::string_view field);

// Splits a raw line on tabs and unescapes each field.
std::vector<std::string> split(std::string_view line);
std::string join(const std::vector<std::string>& fields);

// Calls fn(line_number, line) for every line that is neither empty nor a
// '#' comment. Line numbers are 1-based. Throws InputError if unreadable.
void for_each_line(const std::string& path,
                   const std::function<void(std::size_t, const std::string&)>& fn);

// Opens for writing or throws InputError.
std::ofstream open_output(const std::string& path);

}  // namespace mekb::tsv

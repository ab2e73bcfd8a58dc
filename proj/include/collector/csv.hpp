#pragma once

// Minimal RFC 4180 CSV: fields containing a comma, quote, CR or LF are quoted
// and embedded quotes doubled.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace collector::csv {

std::string escape_field(std::string_view field);
std::string format_row(std::span<const std::string> fields);

/// Splits one logical line (no trailing newline) into fields. Returns false on
/// an unterminated quote or stray characters after a closing quote.
bool parse_row(std::string_view line, std::vector<std::string>& fields);

}  // namespace collector::csv

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gsim::text {

// Maps every code point through Unicode simple case folding (CaseFolding.txt
// status C and S). Throws ParseError on invalid UTF-8.
std::string casefold(std::string_view utf8);

// Strips leading and trailing ASCII whitespace.
std::string_view trim(std::string_view s);

// trim + casefold; the only normalization applied to labels.
std::string normalize_label(std::string_view raw);

// Splits one CSV record. Fields may be wrapped in double quotes, with "" as
// an escaped quote inside. Throws ParseError (without line) on a stray quote.
std::vector<std::string> split_record(std::string_view line, char delimiter);

// Quotes `field` when it contains the delimiter, a quote, CR or LF.
std::string quote_field(std::string_view field, char delimiter = ',');

// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

// Parses a full string as a double; throws ParseError on trailing garbage.
double parse_double(std::string_view s);

}  // namespace gsim::text

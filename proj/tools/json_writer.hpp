#ifndef CONECUSP_TOOLS_JSON_WRITER_HPP
#define CONECUSP_TOOLS_JSON_WRITER_HPP

#include <string>

#include "json.hpp"

namespace conecusp::cli {

using Json = nlohmann::ordered_json;

/// Shortest round-trip text for a double; non-finite values become "null".
std::string format_double(double v);

/// Deterministic pretty printer: keys in insertion order, two-space indent,
/// arrays of scalars kept on one line. Ends with a newline.
std::string to_text(const Json& value);

}  // namespace conecusp::cli

#endif  // CONECUSP_TOOLS_JSON_WRITER_HPP

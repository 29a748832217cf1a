#pragma once

#include <string>

#include "itdflex/net/case.hpp"

namespace itdflex {

/// Loads and validates a case file (JSON, see docs/case-format.md).
/// Throws ParseError on malformed input and ValidationError on invariant
/// violations.
ItdCase load_case(const std::string& path);

/// Parses a case from an in-memory JSON string (same schema as load_case).
ItdCase parse_case(const std::string& json_text);

/// Canonical JSON serialization; numeric fields survive a save/load round
/// trip bit-exactly (shortest round-trip double formatting).
std::string case_to_json(const ItdCase& c);
void save_case(const ItdCase& c, const std::string& path);

} // namespace itdflex

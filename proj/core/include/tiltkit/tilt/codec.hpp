#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltkit/tilt/document.hpp"

namespace tiltkit::tilt {

// Parses and validates `.tilt` text. Throws SyntaxError (with line/column)
// for malformed JSON and ValidationError (with field path) for schema
// violations. The returned document always carries its content hash; a
// non-empty meta.hash in the input must match it.
TiltDocument parse(std::string_view text);

// Validates an already-parsed JSON value. Same contract as parse().
TiltDocument from_json(const nlohmann::json& value);

// JSON structure of the canonical form (meta.hash blanked, optional fields
// omitted when absent, lists always present).
nlohmann::json to_json(const TiltDocument& doc);

// Canonical byte sequence: sorted keys, no insignificant whitespace,
// RFC 3339 UTC timestamps, meta.hash emitted as "".
std::string canonicalize(const TiltDocument& doc);

// SHA-256 over canonicalize(doc).
std::string compute_hash(const TiltDocument& doc);

// Returns doc with meta.hash set to compute_hash(doc).
TiltDocument seal(TiltDocument doc);

// Re-checks every invariant of a programmatically built document. Throws
// ValidationError.
void validate(const TiltDocument& doc);

// Paths of purposes whose legalBasis does not follow GDPR-<art>-<para>-<lit>.
std::vector<std::string> non_normative_legal_bases(const TiltDocument& doc);

}  // namespace tiltkit::tilt

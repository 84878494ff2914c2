// JSON documents: the .aug file and the response bodies of the HTTP API.

#pragma once

#include "bifiber/query.hpp"
#include "bifiber/templates.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace bifiber {

using Json = nlohmann::ordered_json;

inline constexpr int kAugFormatVersion = 1;

std::string save_augmented(const AugmentedArrangement& aug);

/// Throws InputError naming the offending section, or on version mismatch.
AugmentedArrangement load_augmented(std::string_view text);

Json rational_json(const Rational& r);
Json bigrade_json(const Bigrade& g);

Json bounds_json(const AugmentedArrangement& aug);
Json betti_json(const AugmentedArrangement& aug);
Json barcode_json(const Barcode& barcode);
Json diagram_json(const PersistenceDiagram& d);
Json line_json(const LineSpec& line);
Json arrangement_json(const AugmentedArrangement& aug);

/// Barcode plus diagram for one query.
Json query_json(const AugmentedArrangement& aug, const LineSpec& line, bool normalized);

}  // namespace bifiber

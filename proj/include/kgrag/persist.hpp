#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "kgrag/graph.hpp"

namespace kgrag {

inline constexpr int kFormatVersion = 1;

/// JSON document: format_version, embedding_dimension, nodes, triples.
/// Integer literals serialize as JSON integers, real literals always carry a
/// fraction or exponent, so the literal type survives the round trip. Reals
/// use shortest round-trip formatting, so vectors reload bit-exact.
std::string to_json_text(const KnowledgeGraph& graph);

/// Throws VersionMismatch or CorruptFile.
KnowledgeGraph from_json_text(std::string_view text);

/// Writes via a temporary file and rename so readers never see a partial file.
void save(const KnowledgeGraph& graph, const std::filesystem::path& destination);
KnowledgeGraph load(const std::filesystem::path& source);

}  // namespace kgrag

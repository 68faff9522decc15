#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edukg/evalkit.hpp"

namespace edukg::nif {

// Converter for gold corpora published in the NIF 2.x Turtle format.
// Understands the common layout: context resources carrying nif:isString,
// annotation resources with nif:beginIndex/endIndex/referenceContext plus a
// class reference (segment or entity type) and optional itsrdf:taIdentRef.
// NIF offsets count code points; the produced spans are byte offsets.
std::vector<GoldDocument> convert(std::string_view turtle_text, const std::string& origin);

std::vector<GoldDocument> convert_file(const std::filesystem::path& path);

// Writes one <doc_id>.json per document into `out_dir`.
void write_gold_dir(const std::vector<GoldDocument>& docs,
                    const std::filesystem::path& out_dir);

}  // namespace edukg::nif

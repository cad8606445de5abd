#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "attrdesc/attribute_model.hpp"
#include "attrdesc/config.hpp"

namespace attrdesc {

/// Grid forms: "a, b, c" | "lo:hi:step" | "segments:n".
std::vector<double> parse_grid(std::string_view text, const AttributeDecl& decl);

AttributeSchema schema_from_config(const ConfigTree& tree, const std::string& source);
AttributeSchema parse_schema_text(const std::string& text, const std::string& source);
/// Reads and validates a schema file.
AttributeSchema load_schema(const std::filesystem::path& path);

}  // namespace attrdesc

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jade/diagnostics.hpp"

namespace jade::xml {

/// Element node of a parsed document. Covers the subset the run configs use:
/// elements, attributes, text, comments, XML declaration, the five predefined
/// entities. No DTD, CDATA, or namespaces.
struct Node {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;  // declaration order
    std::vector<Node> children;
    std::string text;  // concatenated character data directly inside this element
    int line = 0;
    int col = 0;

    const std::string* attr(const std::string& key) const;
    std::vector<const Node*> children_named(const std::string& name) const;
    const Node* first_child(const std::string& name) const;
};

struct ParseResult {
    std::optional<Node> root;
    Diagnostics diags;
};

ParseResult parse(const std::string& text);
ParseResult parse_file(const std::string& path);

}  // namespace jade::xml

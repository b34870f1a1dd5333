#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hallucheck::detail {

using XmlAttributes = std::vector<std::pair<std::string, std::string>>;

struct XmlHandlers {
    std::function<void(std::string_view name, const XmlAttributes& attrs)> start;
    std::function<void(std::string_view name)> end;
    std::function<void(std::string_view text)> text;
};

/// Streams a file through expat. Undeclared entities from an external DTD
/// (as in the DBLP dump) are resolved from the Latin-1 HTML entity names.
/// Throws Error(XmlError) with the byte offset of the failure.
void parse_xml_file(const std::string& path, const XmlHandlers& handlers);
void parse_xml_string(std::string_view xml, const std::string& label, const XmlHandlers& handlers);

[[nodiscard]] std::string_view attribute(const XmlAttributes& attrs, std::string_view name);

} // namespace hallucheck::detail

#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <filesystem>

namespace hallucheck {

std::string source_id_from_path(const std::string& path)
{
    return std::filesystem::path(path).stem().string();
}

DocumentText load_plaintext_list(const std::string& path)
{
    DocumentText doc;
    doc.source_id = source_id_from_path(path);
    doc.blocks.push_back({util::read_file(path), 0});
    return doc;
}

TextSpan whole_document_span(const DocumentText& doc)
{
    TextSpan span;
    span.text = doc.joined();
    span.begin = 0;
    span.end = span.text.size();
    return span;
}

DocumentText load_block_text(const std::string& path)
{
    std::string content = util::read_file(path);
    DocumentText doc;
    doc.source_id = source_id_from_path(path);
    int page = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t nl = content.find('\n', start);
        std::string_view line = std::string_view(content).substr(
            start, nl == std::string::npos ? std::string::npos : nl - start);
        std::size_t ff;
        while ((ff = line.find('\f')) != std::string_view::npos) {
            if (ff > 0) {
                doc.blocks.push_back({std::string(line.substr(0, ff)), page});
            }
            ++page;
            line.remove_prefix(ff + 1);
        }
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        doc.blocks.push_back({std::string(line), page});
        if (nl == std::string::npos) {
            break;
        }
        start = nl + 1;
    }
    while (!doc.blocks.empty() && doc.blocks.back().text.empty()) {
        doc.blocks.pop_back();
    }
    return doc;
}

} // namespace hallucheck

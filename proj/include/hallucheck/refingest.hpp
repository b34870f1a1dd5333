#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hallucheck {

[[nodiscard]] std::string source_id_from_path(const std::string& path);

struct TextBlock {
    std::string text;
    int page = 0;
};

/// Extracted text of one paper, blocks in document order.
struct DocumentText {
    std::string source_id;
    std::vector<TextBlock> blocks;

    /// Blocks joined with '\n'; all offsets in this module refer to this text.
    [[nodiscard]] std::string joined() const;
};

struct TextSpan {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct RawReference {
    std::string source_id;
    std::size_t ordinal = 0;
    std::string raw;
    /// Offsets into the reference section text.
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
};

enum class ArxivStyle { New, Old };

struct ArxivId {
    ArxivStyle style = ArxivStyle::New;
    /// "YYMM.NNNNN" or "archive/NNNNNNN", without the version suffix.
    std::string value;
    std::optional<int> version;

    [[nodiscard]] std::string render() const;
    friend bool operator==(const ArxivId&, const ArxivId&) = default;
};

struct Identifiers {
    std::optional<ArxivId> arxiv_id;
    std::optional<std::string> doi;
    std::optional<std::string> url;
    std::optional<std::string> acl_id;
    /// Text following an "arXiv:" marker that failed the identifier grammar.
    std::optional<std::string> malformed_arxiv;

    [[nodiscard]] bool any() const noexcept
    {
        return arxiv_id || doi || url || acl_id || malformed_arxiv;
    }
};

struct ParsedReference {
    RawReference raw_ref;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> title;
    std::optional<std::string> venue;
    std::optional<std::string> pages;
    Identifiers identifiers;
};

struct SectionOptions {
    std::vector<std::string> headings {"references", "bibliography"};
};

/// Locates the reference list: from the line after the first references
/// heading up to the next appendix-level heading or the end of the document.
/// Throws Error(NoReferencesSection) when no heading exists.
[[nodiscard]] TextSpan extract_reference_section(const DocumentText& doc,
                                                 const SectionOptions& options = {});

[[nodiscard]] std::vector<RawReference> segment_entries(const TextSpan& section,
                                                        const std::string& source_id);

[[nodiscard]] ParsedReference parse_reference(const RawReference& raw);

/// First identifier following an "arXiv:" marker (case-insensitive).
/// Throws Error(NoIdentifier) or Error(MalformedIdentifier).
[[nodiscard]] ArxivId parse_arxiv_id(std::string_view text);

/// Validates a bare identifier such as "2402.12345v2" or "hep-th/9901001".
[[nodiscard]] std::optional<ArxivId> parse_bare_arxiv_id(std::string_view text);

/// The file is a bare reference list; pair with whole_document_span().
[[nodiscard]] DocumentText load_plaintext_list(const std::string& path);
[[nodiscard]] TextSpan whole_document_span(const DocumentText& doc);

/// One block per line, form-feed advances the page ordinal.
[[nodiscard]] DocumentText load_block_text(const std::string& path);

[[nodiscard]] std::vector<ParsedReference> load_bibtex(const std::string& path);
[[nodiscard]] std::vector<ParsedReference> parse_bibtex(std::string_view text,
                                                        const std::string& source_id);

/// Entries shorter than this parse to all-absent fields.
inline constexpr std::size_t kMinParsableLength = 20;

} // namespace hallucheck

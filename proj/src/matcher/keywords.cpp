#include "hallucheck/matcher.hpp"
#include "hallucheck/util.hpp"

#include <cctype>

namespace hallucheck {

namespace {

bool is_word_byte(char c) noexcept
{
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

bool token_match_at(std::string_view text, std::size_t pos, std::size_t len) noexcept
{
    bool left = pos == 0 || !is_word_byte(text[pos - 1]);
    bool right = pos + len >= text.size() || !is_word_byte(text[pos + len]);
    return left && right;
}

} // namespace

KeywordSet KeywordSet::defaults()
{
    return KeywordSet {{"ACL", "EMNLP", "NAACL", "EACL", "AACL", "CoNLL", "TACL",
                        "Computational Linguistics", "Findings", "arXiv"}};
}

std::set<std::string> detect_keywords(std::string_view text_in, const KeywordSet& keywords)
{
    std::string text = util::collapse_whitespace(text_in);
    std::set<std::string> found;
    for (const std::string& kw : keywords.keywords) {
        if (kw.empty()) {
            continue;
        }
        bool icase = util::ascii_lower(kw) == "arxiv";
        std::size_t pos = 0;
        while (true) {
            pos = icase ? util::find_icase(text, kw, pos) : text.find(kw, pos);
            if (pos == std::string::npos) {
                break;
            }
            if (token_match_at(text, pos, kw.size())) {
                found.insert(kw);
                break;
            }
            ++pos;
        }
    }
    return found;
}

std::set<std::string> detect_keywords(const RawReference& raw, const KeywordSet& keywords)
{
    return detect_keywords(raw.raw, keywords);
}

} // namespace hallucheck

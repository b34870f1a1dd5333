#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <cctype>
#include <map>

namespace hallucheck {

namespace {

class BibtexReader {
public:
    BibtexReader(std::string_view text, std::string source_id)
        : text_(text), source_id_(std::move(source_id))
    {
    }

    std::vector<ParsedReference> read()
    {
        std::vector<ParsedReference> out;
        while (true) {
            std::size_t at = text_.find('@', pos_);
            if (at == std::string_view::npos) {
                break;
            }
            pos_ = at + 1;
            std::string type = util::ascii_lower(read_identifier());
            skip_space();
            if (pos_ >= text_.size() || (text_[pos_] != '{' && text_[pos_] != '(')) {
                // Stray '@' outside an entry (e.g. in a comment line).
                continue;
            }
            char open = text_[pos_];
            char close = open == '{' ? '}' : ')';
            if (type == "comment" || type == "preamble") {
                skip_balanced(open, close, out.size());
                continue;
            }
            if (type == "string") {
                ++pos_;
                read_string_macro(out.size());
                skip_space();
                expect(close, out.size());
                continue;
            }
            out.push_back(read_entry(at, open, close, out.size()));
        }
        return out;
    }

private:
    [[noreturn]] void fail(std::size_t entry, const std::string& what) const
    {
        std::string key = current_key_.empty() ? "" : " (" + current_key_ + ")";
        throw Error(ErrorCode::BibtexSyntaxError,
                    "bibtex entry " + std::to_string(entry) + key + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string read_identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':'
                || c == '.' || c == '/' || c == '+' || c == '\'') {
                ++pos_;
            } else {
                break;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect(char c, std::size_t entry)
    {
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(entry, std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    void skip_balanced(char open, char close, std::size_t entry)
    {
        int depth = 0;
        for (; pos_ < text_.size(); ++pos_) {
            if (text_[pos_] == open) {
                ++depth;
            } else if (text_[pos_] == close) {
                if (--depth == 0) {
                    ++pos_;
                    return;
                }
            }
        }
        fail(entry, "unbalanced braces");
    }

    std::string read_braced(std::size_t entry)
    {
        // pos_ at '{'
        int depth = 0;
        std::size_t start = pos_ + 1;
        for (; pos_ < text_.size(); ++pos_) {
            char c = text_[pos_];
            if (c == '\\') {
                ++pos_;
                continue;
            }
            if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    std::string value(text_.substr(start, pos_ - start));
                    ++pos_;
                    return value;
                }
            } else if (c == '@' && depth == 1 && looks_like_entry_start(pos_)) {
                break;
            }
        }
        fail(entry, "unbalanced braces");
    }

    bool looks_like_entry_start(std::size_t at) const
    {
        // "@article{" at the start of a line inside a value means a missing brace.
        if (at > 0 && text_[at - 1] != '\n') {
            return false;
        }
        std::size_t p = at + 1;
        while (p < text_.size() && std::isalpha(static_cast<unsigned char>(text_[p]))) {
            ++p;
        }
        return p > at + 1 && p < text_.size() && (text_[p] == '{' || text_[p] == '(');
    }

    std::string read_quoted(std::size_t entry)
    {
        std::size_t start = ++pos_;
        int depth = 0;
        for (; pos_ < text_.size(); ++pos_) {
            char c = text_[pos_];
            if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth < 0) {
                    fail(entry, "unbalanced braces in quoted value");
                }
            } else if (c == '"' && depth == 0 && text_[pos_ - 1] != '\\') {
                std::string value(text_.substr(start, pos_ - start));
                ++pos_;
                return value;
            }
        }
        fail(entry, "unterminated quoted value");
    }

    std::string read_value(std::size_t entry)
    {
        std::string value;
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) {
                fail(entry, "unexpected end of input");
            }
            char c = text_[pos_];
            if (c == '{') {
                value += read_braced(entry);
            } else if (c == '"') {
                value += read_quoted(entry);
            } else {
                std::string word = read_identifier();
                if (word.empty()) {
                    fail(entry, "expected a field value");
                }
                auto it = macros_.find(util::ascii_lower(word));
                value += it != macros_.end() ? it->second : word;
            }
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == '#') {
                ++pos_;
                continue;
            }
            return value;
        }
    }

    void read_string_macro(std::size_t entry)
    {
        skip_space();
        std::string name = util::ascii_lower(read_identifier());
        skip_space();
        expect('=', entry);
        macros_[name] = read_value(entry);
    }

    ParsedReference read_entry(std::size_t at, char open, char close, std::size_t entry)
    {
        (void)open;
        ++pos_;
        skip_space();
        current_key_ = read_identifier();
        skip_space();
        std::map<std::string, std::string> fields;
        if (pos_ < text_.size() && text_[pos_] == ',') {
            ++pos_;
        }
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) {
                fail(entry, "unbalanced braces");
            }
            if (text_[pos_] == close) {
                ++pos_;
                break;
            }
            std::string name = util::ascii_lower(read_identifier());
            if (name.empty()) {
                fail(entry, std::string("unexpected character '") + text_[pos_] + "'");
            }
            skip_space();
            expect('=', entry);
            fields[name] = read_value(entry);
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
            }
        }
        ParsedReference ref = to_reference(fields, at, entry);
        current_key_.clear();
        return ref;
    }

    ParsedReference to_reference(const std::map<std::string, std::string>& fields, std::size_t at,
                                 std::size_t entry) const
    {
        ParsedReference ref;
        ref.raw_ref.source_id = source_id_;
        ref.raw_ref.ordinal = entry;
        ref.raw_ref.raw = util::collapse_whitespace(text_.substr(at, pos_ - at));
        ref.raw_ref.span_begin = at;
        ref.raw_ref.span_end = pos_;

        auto field = [&](const char* name) -> std::optional<std::string> {
            auto it = fields.find(name);
            if (it == fields.end()) {
                return std::nullopt;
            }
            std::string v = clean_value(it->second);
            if (v.empty()) {
                return std::nullopt;
            }
            return v;
        };

        ref.title = field("title");
        if (auto authors = fields.find("author"); authors != fields.end()) {
            for (std::string& a : split_and(authors->second)) {
                std::string name = clean_value(a);
                if (!name.empty() && util::ascii_lower(name) != "others") {
                    ref.authors.push_back(std::move(name));
                }
            }
        }
        if (auto year = field("year")) {
            try {
                int y = std::stoi(*year);
                if (y >= 1900 && y <= util::current_year() + 1) {
                    ref.year = y;
                }
            } catch (const std::exception&) {
            }
        }
        ref.venue = field("journal");
        if (!ref.venue) {
            ref.venue = field("booktitle");
        }
        ref.pages = field("pages");
        ref.identifiers.doi = field("doi");
        ref.identifiers.url = field("url");
        if (auto eprint = field("eprint")) {
            std::string id = *eprint;
            if (util::starts_with_icase(id, "arxiv:")) {
                id = std::string(util::trim(std::string_view(id).substr(6)));
            }
            if (auto parsed = parse_bare_arxiv_id(id)) {
                ref.identifiers.arxiv_id = parsed;
            } else {
                ref.identifiers.malformed_arxiv = *eprint;
            }
        }
        if (ref.identifiers.url) {
            const std::string& url = *ref.identifiers.url;
            for (std::string_view host : {std::string_view("aclanthology.org/"), std::string_view("aclweb.org/anthology/")}) {
                if (auto p = url.find(host); p != std::string::npos) {
                    std::string id = url.substr(p + host.size());
                    while (!id.empty() && id.back() == '/') {
                        id.pop_back();
                    }
                    if (id.ends_with(".pdf")) {
                        id.resize(id.size() - 4);
                    }
                    if (!id.empty() && id.find('/') == std::string::npos) {
                        ref.identifiers.acl_id = id;
                    }
                }
            }
        }
        return ref;
    }

    static std::vector<std::string> split_and(const std::string& value)
    {
        std::vector<std::string> parts;
        int depth = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i < value.size(); ++i) {
            char c = value[i];
            if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
            } else if (depth == 0 && std::isspace(static_cast<unsigned char>(c))
                       && i + 4 < value.size() && util::starts_with_icase(std::string_view(value).substr(i + 1), "and")
                       && std::isspace(static_cast<unsigned char>(value[i + 4]))) {
                parts.push_back(value.substr(start, i - start));
                start = i + 5;
                i += 4;
            }
        }
        parts.push_back(value.substr(start));
        return parts;
    }

    static std::string clean_value(std::string_view v)
    {
        std::string out;
        out.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            char c = v[i];
            if (c == '{' || c == '}') {
                continue;
            }
            if (c == '\\' && i + 1 < v.size()) {
                char n = v[i + 1];
                if (n == '&' || n == '%' || n == '_' || n == '$' || n == '#') {
                    out.push_back(n);
                    ++i;
                    continue;
                }
            }
            out.push_back(c);
        }
        return util::collapse_whitespace(out);
    }

    std::string_view text_;
    std::string source_id_;
    std::size_t pos_ = 0;
    std::string current_key_;
    std::map<std::string, std::string> macros_;
};

} // namespace

std::vector<ParsedReference> parse_bibtex(std::string_view text, const std::string& source_id)
{
    return BibtexReader(text, source_id).read();
}

std::vector<ParsedReference> load_bibtex(const std::string& path)
{
    return parse_bibtex(util::read_file(path), source_id_from_path(path));
}

} // namespace hallucheck

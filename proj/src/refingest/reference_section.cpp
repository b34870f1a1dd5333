#include "author_year.hpp"

#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hallucheck {

namespace detail {

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

std::string_view strip_token(std::string_view tok) noexcept
{
    auto strip = [](char c) {
        return c == ',' || c == '.' || c == ';' || c == '(' || c == ')' || c == '*' || c == '"';
    };
    while (!tok.empty() && strip(tok.front())) {
        tok.remove_prefix(1);
    }
    while (!tok.empty() && strip(tok.back())) {
        tok.remove_suffix(1);
    }
    return tok;
}

constexpr std::array<std::string_view, 8> kConnectors {
    "and", "&", "et", "al", "others", "the", "team", "others."};

constexpr std::array<std::string_view, 22> kParticles {
    "van", "von", "de", "der", "den", "del", "della", "di", "da", "du", "dos",
    "das", "la", "le", "bin", "ibn", "y", "zu", "ter", "ten", "el", "dal"};

} // namespace

std::optional<YearSentence> find_year_sentence(std::string_view text, std::size_t limit)
{
    std::size_t end = std::min(text.size(), limit);
    for (std::size_t i = 2; i + 4 <= end; ++i) {
        // Preceded by "<something>. " (or "<something>. (").
        if (text[i - 1] != ' ' || text[i - 2] != '.') {
            continue;
        }
        std::size_t p = i;
        bool paren = text[p] == '(';
        if (paren) {
            ++p;
        }
        if (p + 4 > text.size()
            || !(text.compare(p, 2, "19") == 0 || text.compare(p, 2, "20") == 0)
            || !is_digit(text[p + 2]) || !is_digit(text[p + 3])) {
            continue;
        }
        std::size_t pos = p + 4;
        if (pos < text.size() && text[pos] >= 'a' && text[pos] <= 'z') {
            ++pos;
        }
        if (paren) {
            if (pos >= text.size() || text[pos] != ')') {
                continue;
            }
            ++pos;
        }
        if (pos >= text.size() || (text[pos] != '.' && text[pos] != ',')) {
            continue;
        }
        ++pos;
        if (pos < text.size() && text[pos] != ' ') {
            continue;
        }
        while (pos < text.size() && text[pos] == ' ') {
            ++pos;
        }
        YearSentence ys;
        ys.authors_end = i - 1;
        ys.year_pos = p;
        ys.year = std::stoi(std::string(text.substr(p, 4)));
        ys.after = pos;
        return ys;
    }
    return std::nullopt;
}

bool looks_like_author_list(std::string_view prefix)
{
    std::size_t names = 0;
    std::size_t unknown = 0;
    std::size_t total = 0;
    std::size_t pos = 0;
    while (pos < prefix.size()) {
        while (pos < prefix.size() && prefix[pos] == ' ') {
            ++pos;
        }
        std::size_t start = pos;
        while (pos < prefix.size() && prefix[pos] != ' ') {
            ++pos;
        }
        std::string_view tok = strip_token(prefix.substr(start, pos - start));
        if (tok.empty()) {
            continue;
        }
        ++total;
        auto first = static_cast<unsigned char>(tok.front());
        std::string lower = util::ascii_lower(tok);
        if (std::find(kConnectors.begin(), kConnectors.end(), lower) != kConnectors.end()) {
            continue;
        }
        if (std::all_of(tok.begin(), tok.end(), [](char c) { return is_digit(c); })) {
            continue;
        }
        if (std::isupper(first) || first >= 0x80) {
            ++names;
            continue;
        }
        if (std::find(kParticles.begin(), kParticles.end(), lower) != kParticles.end()) {
            continue;
        }
        ++unknown;
    }
    if (total == 0 || total > 150) {
        return false;
    }
    if (total == 1) {
        return true;
    }
    return names >= 1 && unknown <= 1;
}

bool starts_with_numeric_label(std::string_view line)
{
    line = util::trim(line);
    if (line.size() < 3 || line.front() != '[') {
        return false;
    }
    std::size_t n = 1;
    while (n < line.size() && is_digit(line[n])) {
        ++n;
    }
    return n > 1 && n <= 5 && n < line.size() && line[n] == ']';
}

} // namespace detail

std::string DocumentText::joined() const
{
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) {
            out.push_back('\n');
        }
        out += blocks[i].text;
    }
    return out;
}

namespace {

struct Line {
    std::string_view text;
    std::size_t offset = 0;
};

std::vector<Line> lines_with_offsets(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find_first_of("\n\f", start);
        if (nl == std::string_view::npos) {
            lines.push_back({text.substr(start), start});
            break;
        }
        lines.push_back({text.substr(start, nl - start), start});
        start = nl + 1;
    }
    return lines;
}

std::string_view strip_heading_number(std::string_view s)
{
    std::size_t i = 0;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
        ++i;
    }
    if (i == 0) {
        // Roman numerals such as "VII."
        while (i < s.size() && std::string_view("IVXLC").find(s[i]) != std::string_view::npos) {
            ++i;
        }
        if (i == 0 || i >= s.size() || s[i] != '.') {
            return s;
        }
        ++i;
    }
    return util::trim(s.substr(i));
}

bool is_heading(std::string_view line, const SectionOptions& options)
{
    std::string_view t = util::trim(line);
    if (t.empty() || t.size() > 40) {
        return false;
    }
    t = strip_heading_number(t);
    if (!t.empty() && t.back() == ':') {
        t.remove_suffix(1);
    }
    std::string lower = util::ascii_lower(t);
    return std::find(options.headings.begin(), options.headings.end(), lower) != options.headings.end();
}

bool ends_with_year_sentence(std::string_view line)
{
    // "... Black. 2022." or "... (2022)."
    std::string_view t = util::trim(line);
    if (t.size() < 5 || t.back() != '.') {
        return false;
    }
    t.remove_suffix(1);
    if (!t.empty() && t.back() == ')') {
        t.remove_suffix(1);
    }
    if (!t.empty() && t.back() >= 'a' && t.back() <= 'z') {
        t.remove_suffix(1);
    }
    if (t.size() < 4) {
        return false;
    }
    std::string_view year = t.substr(t.size() - 4);
    return std::all_of(year.begin(), year.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_appendix_heading(std::string_view line, std::string_view prev_line)
{
    std::string_view t = util::trim(line);
    if (t.empty() || t.size() > 80) {
        return false;
    }
    if (util::starts_with_icase(t, "appendices")) {
        return true;
    }
    if (util::starts_with_icase(t, "appendix")) {
        return t.size() == 8 || !std::isalpha(static_cast<unsigned char>(t[8]));
    }
    if (util::starts_with_icase(t, "supplementary material")
        || util::starts_with_icase(t, "supplemental material")) {
        return true;
    }
    // Lettered appendix sections such as "A Experimental Details" or "B.1 Prompts".
    if (t.size() > 50 || t.back() == '.' || t.find(',') != std::string_view::npos) {
        return false;
    }
    if (!(t[0] >= 'A' && t[0] <= 'H')) {
        return false;
    }
    std::size_t i = 1;
    while (i < t.size() && (t[i] == '.' || std::isdigit(static_cast<unsigned char>(t[i])))) {
        ++i;
    }
    if (i >= t.size() || t[i] != ' ') {
        return false;
    }
    std::string_view rest = util::trim(t.substr(i));
    std::size_t words = 0;
    std::size_t pos = 0;
    while (pos < rest.size()) {
        std::size_t sp = rest.find(' ', pos);
        std::string_view w = rest.substr(pos, sp == std::string_view::npos ? rest.npos : sp - pos);
        pos = sp == std::string_view::npos ? rest.size() : sp + 1;
        if (w.empty()) {
            continue;
        }
        ++words;
        bool capital = std::isupper(static_cast<unsigned char>(w[0])) != 0;
        if (words == 1 && !capital) {
            return false;
        }
        if (w.size() >= 4 && !capital) {
            return false;
        }
    }
    if (words == 0 || words > 8) {
        return false;
    }
    std::string_view prev = util::trim(prev_line);
    if (!prev.empty() && prev.back() != '.' && prev.back() != ')') {
        return false;
    }
    return !ends_with_year_sentence(prev);
}

bool is_terminal(std::string_view line)
{
    std::string_view t = util::trim(line);
    if (t.empty()) {
        return true;
    }
    char last = t.back();
    if (last == ',' || last == ';' || last == ':' || last == '-' || last == '&' || last == '(') {
        return false;
    }
    for (std::string_view tail : {" and", " et", " of", " the", " in", " In"}) {
        if (t.size() > tail.size() && t.substr(t.size() - tail.size()) == tail) {
            return false;
        }
    }
    return true;
}

/// Inside an author list a period may only follow an initial ("A.", "Ch."),
/// "al" or a suffix; any other word ending in '.' closes a sentence.
bool has_sentence_break(std::string_view authors)
{
    std::size_t pos = 0;
    while ((pos = authors.find(". ", pos)) != std::string_view::npos) {
        std::size_t start = authors.rfind(' ', pos);
        start = start == std::string_view::npos ? 0 : start + 1;
        std::string_view word = authors.substr(start, pos - start);
        while (!word.empty() && (word.front() == '(' || word.front() == '-')) {
            word.remove_prefix(1);
        }
        bool initial = !word.empty() && word.size() <= 2 && std::isupper(static_cast<unsigned char>(word[0]))
            && (word.size() == 1 || std::islower(static_cast<unsigned char>(word[1])));
        bool hyphenated_initial = word.size() == 4 && word[1] == '.' && word[2] == '-';
        if (!initial && !hyphenated_initial && word != "al" && word != "Jr" && word != "Sr") {
            return true;
        }
        ++pos;
    }
    return false;
}

bool has_author_year_opener(std::string_view text)
{
    if (text.empty()) {
        return false;
    }
    auto ys = detail::find_year_sentence(text);
    if (!ys) {
        return false;
    }
    std::string_view authors = text.substr(0, ys->authors_end);
    // Lower-case openers only for single-word organisation authors ("openai. 2024.").
    auto first = static_cast<unsigned char>(text.front());
    bool single_word = authors.find(' ') == std::string_view::npos && authors.size() >= 3 && authors != "al";
    if (!std::isupper(first) && first < 0x80 && !(std::islower(first) && single_word)) {
        return false;
    }
    return !has_sentence_break(authors) && detail::looks_like_author_list(authors);
}

} // namespace

TextSpan extract_reference_section(const DocumentText& doc, const SectionOptions& options)
{
    std::string text = doc.joined();
    auto lines = lines_with_offsets(text);
    std::size_t heading = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_heading(lines[i].text, options)) {
            heading = i;
            break;
        }
    }
    if (heading == lines.size()) {
        throw Error(ErrorCode::NoReferencesSection,
                    "no references heading in '" + doc.source_id + "'");
    }
    std::size_t begin = heading + 1 < lines.size() ? lines[heading + 1].offset : text.size();
    std::size_t end = text.size();
    for (std::size_t i = heading + 1; i < lines.size(); ++i) {
        if (is_appendix_heading(lines[i].text, lines[i - 1].text)) {
            end = lines[i].offset;
            break;
        }
    }
    while (end > begin && (text[end - 1] == '\n' || text[end - 1] == '\f')) {
        --end;
    }
    TextSpan span;
    span.begin = begin;
    span.end = std::max(begin, end);
    span.text = text.substr(span.begin, span.end - span.begin);
    return span;
}

std::vector<RawReference> segment_entries(const TextSpan& section, const std::string& source_id)
{
    auto lines = lines_with_offsets(section.text);
    std::vector<RawReference> out;

    struct Open {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::string text;
        bool labelled = false;
    };
    std::optional<Open> cur;

    auto close = [&] {
        if (cur && !util::trim(cur->text).empty()) {
            RawReference ref;
            ref.source_id = source_id;
            ref.ordinal = out.size();
            ref.raw = util::collapse_whitespace(cur->text);
            ref.span_begin = cur->begin;
            ref.span_end = cur->end;
            out.push_back(std::move(ref));
        }
        cur.reset();
    };

    auto window_from = [&](std::size_t i) {
        std::string w;
        for (std::size_t k = i; k < lines.size() && k < i + 3; ++k) {
            std::string_view t = util::trim(lines[k].text);
            if (t.empty()) {
                break;
            }
            if (!w.empty()) {
                w.push_back(' ');
            }
            w += t;
        }
        return util::collapse_whitespace(w);
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view raw_line = lines[i].text;
        std::string_view t = util::trim(raw_line);
        if (t.empty()) {
            close();
            continue;
        }
        std::size_t lead = static_cast<std::size_t>(t.data() - raw_line.data());
        std::size_t line_begin = lines[i].offset + lead;
        std::size_t line_end = line_begin + t.size();
        bool label = detail::starts_with_numeric_label(t);

        bool start_new = false;
        if (cur) {
            if (label) {
                start_new = true;
            } else if (!cur->labelled && is_terminal(lines[i - 1].text)
                       && has_author_year_opener(window_from(i))) {
                std::string so_far = util::collapse_whitespace(cur->text);
                start_new = detail::find_year_sentence(so_far).has_value();
            }
        }
        if (cur && !start_new) {
            cur->text.push_back(' ');
            cur->text += t;
            cur->end = line_end;
            continue;
        }
        close();
        cur = Open {line_begin, line_end, std::string(t), label};
    }
    close();
    return out;
}

} // namespace hallucheck

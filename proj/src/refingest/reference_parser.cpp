#include "author_year.hpp"

#include "hallucheck/error.hpp"
#include "hallucheck/refingest.hpp"
#include "hallucheck/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

namespace hallucheck {

namespace {

constexpr std::array<std::string_view, 14> kAbbreviations {
    "vs", "e.g", "i.e", "etc", "Vol", "No", "St", "Dr", "Mr", "Ms", "Proc", "Conf", "Int", "Fig"};

/// Words that begin a venue/publication tail rather than continuing a title.
constexpr std::array<std::string_view, 30> kVenueCues {
    "In ", "In: ", "arXiv", "ArXiv", "Preprint", "CoRR", "Proceedings", "Proc.", "Transactions",
    "Journal", "Findings", "Advances in", "International Conference", "Conference", "Workshop",
    "IEEE", "ACM", "Association for", "Computational Linguistics", "NeurIPS", "ICLR", "ICML",
    "AAAI", "ACL", "EMNLP", "NAACL", "EACL", "COLING", "TACL", "http"};

/// Phrases that end a title even without a preceding sentence break.
constexpr std::array<std::string_view, 6> kHardCues {
    " arXiv preprint", " In Proceedings", " Preprint, arXiv", " https://", " http://", " ArXiv preprint"};

bool starts_with_venue_cue(std::string_view s)
{
    return std::any_of(kVenueCues.begin(), kVenueCues.end(),
                       [&](std::string_view cue) { return s.substr(0, cue.size()) == cue; });
}

bool is_abbreviation_before(std::string_view text, std::size_t dot)
{
    std::size_t start = dot;
    while (start > 0 && text[start - 1] != ' ') {
        --start;
    }
    std::string_view word = text.substr(start, dot - start);
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string_view strip_title_punct(std::string_view s)
{
    s = util::trim(s);
    auto edge = [](char c) { return c == '.' || c == ',' || c == ';' || c == '*' || c == '"'; };
    while (!s.empty() && edge(s.back())) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == '*' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    return util::trim(s);
}

struct TitleSplit {
    std::string_view title;
    std::string_view tail;
};

/// Splits "Title. Venue..." at the first title terminator.
TitleSplit split_title(std::string_view rest)
{
    for (std::size_t i = 0; i < rest.size(); ++i) {
        char c = rest[i];
        if (c == ' ') {
            for (std::string_view cue : kHardCues) {
                if (rest.substr(i, cue.size()) == cue && i > 0) {
                    return {rest.substr(0, i), rest.substr(i + 1)};
                }
            }
            continue;
        }
        bool sentence_end = i + 1 == rest.size() || rest[i + 1] == ' ';
        if (!sentence_end) {
            continue;
        }
        if (c == '.') {
            if (is_abbreviation_before(rest, i)) {
                continue;
            }
            return {rest.substr(0, i), i + 1 < rest.size() ? rest.substr(i + 2) : std::string_view {}};
        }
        if (c == '?' || c == '!') {
            std::string_view after = i + 2 <= rest.size() ? rest.substr(std::min(i + 2, rest.size())) : "";
            if (i + 1 == rest.size() || starts_with_venue_cue(after)) {
                return {rest.substr(0, i + 1), after};
            }
        }
    }
    return {rest, {}};
}

bool is_initials(std::string_view piece)
{
    // "T.", "M. K.", "J.-P."
    if (piece.empty()) {
        return false;
    }
    bool saw_letter = false;
    for (std::size_t i = 0; i < piece.size(); ++i) {
        char c = piece[i];
        if (std::isupper(static_cast<unsigned char>(c))) {
            if (i + 1 < piece.size() && std::isalpha(static_cast<unsigned char>(piece[i + 1]))) {
                return false;
            }
            saw_letter = true;
        } else if (c != '.' && c != ' ' && c != '-') {
            return false;
        }
    }
    return saw_letter;
}

bool is_filler_author(std::string_view piece)
{
    std::string lower = util::ascii_lower(piece);
    if (lower == "et al" || lower == "et al." || lower == "others" || lower == "et" || lower == "al") {
        return true;
    }
    if (lower.ends_with(" others")) {
        std::string_view head = std::string_view(lower).substr(0, lower.size() - 7);
        return std::all_of(head.begin(), head.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    }
    return !std::any_of(piece.begin(), piece.end(), [](char ch) {
        return std::isalpha(static_cast<unsigned char>(ch)) || static_cast<unsigned char>(ch) >= 0x80;
    });
}

std::string_view strip_et_al(std::string_view piece)
{
    for (std::string_view suffix : {std::string_view(" et al."), std::string_view(" et al")}) {
        if (piece.size() > suffix.size() && piece.ends_with(suffix)) {
            return util::trim(piece.substr(0, piece.size() - suffix.size()));
        }
    }
    return piece;
}

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = s.find(sep, pos);
        parts.push_back(s.substr(pos, hit == std::string_view::npos ? s.npos : hit - pos));
        if (hit == std::string_view::npos) {
            break;
        }
        pos = hit + sep.size();
    }
    return parts;
}

std::vector<std::string> split_authors(std::string_view block, std::string_view source)
{
    block = util::trim(block);
    while (!block.empty() && (block.back() == '.' || block.back() == ',')) {
        block.remove_suffix(1);
    }
    std::vector<std::string_view> pieces;
    for (std::string_view comma_part : split_on(block, ", ")) {
        for (std::string_view and_part : split_on(comma_part, " and ")) {
            for (std::string_view amp_part : split_on(and_part, " & ")) {
                std::string_view p = util::trim(amp_part);
                for (std::string_view lead : {std::string_view("and "), std::string_view("& ")}) {
                    if (p.starts_with(lead)) {
                        p = util::trim(p.substr(lead.size()));
                    }
                }
                pieces.push_back(p);
            }
        }
    }

    std::vector<std::string> authors;
    std::vector<std::string_view> views;
    for (std::string_view p : pieces) {
        p = strip_et_al(p);
        if (p.empty() || is_filler_author(p)) {
            continue;
        }
        // "Last, F. M." style: re-attach initials to the preceding surname when
        // the joined form occurs verbatim.
        if (is_initials(p) && !views.empty()) {
            std::string joined = std::string(views.back()) + ", " + std::string(p);
            if (source.find(joined) != std::string_view::npos) {
                authors.back() = joined;
                views.back() = p;
                continue;
            }
        }
        authors.emplace_back(p);
        views.push_back(p);
    }
    return authors;
}

bool year_in_range(int year)
{
    return year >= 1900 && year <= util::current_year() + 1;
}

std::optional<int> last_standalone_year(std::string_view s)
{
    static const std::regex year_re(R"((?:^|[^0-9A-Za-z])((?:19|20)\d\d)(?![0-9]))");
    std::optional<int> found;
    for (auto it = std::cregex_iterator(s.data(), s.data() + s.size(), year_re);
         it != std::cregex_iterator(); ++it) {
        int y = std::stoi((*it)[1].str());
        if (year_in_range(y)) {
            found = y;
        }
    }
    return found;
}

struct VenuePages {
    std::optional<std::string> venue;
    std::optional<std::string> pages;
};

VenuePages parse_tail(std::string_view tail)
{
    VenuePages vp;
    tail = util::trim(tail);
    if (tail.starts_with("In: ")) {
        tail.remove_prefix(4);
    } else if (tail.starts_with("In ")) {
        tail.remove_prefix(3);
    }
    tail = util::trim(tail);
    std::string tail_str(tail);

    static const std::regex pages_keyword(R"((?:pages?|pp\.?)\s*(\d+(?:\s*(?:–|—|-{1,2})\s*\d+)?))");
    static const std::regex volume_pages(R"((\d+(?:\(\d+\))?:\d+(?:\s*(?:–|—|-{1,2})\s*\d+)?))");
    static const std::regex bare_range(R"((?:^|[,\s])(\d+\s*(?:–|—|-{1,2})\s*\d+)(?=[.,;\s)]|$))");

    std::size_t venue_end = tail.size();
    std::smatch m;
    if (std::regex_search(tail_str, m, pages_keyword) || std::regex_search(tail_str, m, volume_pages)
        || std::regex_search(tail_str, m, bare_range)) {
        vp.pages = m[1].str();
        venue_end = static_cast<std::size_t>(m.position(0));
    }
    // A venue never spans a sentence break.
    for (std::size_t i = 0; i + 1 < venue_end; ++i) {
        if (tail[i] == '.' && tail[i + 1] == ' ' && !is_abbreviation_before(tail, i)) {
            venue_end = i;
            break;
        }
    }
    std::string_view venue = tail.substr(0, venue_end);
    // Trailing "(pp." style openers and separators.
    venue = util::trim(venue);
    while (!venue.empty() && (venue.back() == ',' || venue.back() == '.' || venue.back() == ';'
                              || venue.back() == '(' || venue.back() == ' ')) {
        venue.remove_suffix(1);
    }
    venue = strip_title_punct(venue);
    if (!venue.empty()) {
        vp.venue = std::string(venue);
    }
    return vp;
}

std::string_view strip_label(std::string_view text)
{
    if (detail::starts_with_numeric_label(text)) {
        std::size_t close = text.find(']');
        return util::trim(text.substr(close + 1));
    }
    return text;
}

std::string_view url_token(std::string_view text, std::size_t pos)
{
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ') {
        ++end;
    }
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && (tok.back() == '.' || tok.back() == ',' || tok.back() == ')' || tok.back() == ';')) {
        tok.remove_suffix(1);
    }
    return tok;
}

Identifiers extract_identifiers(std::string_view text)
{
    Identifiers ids;
    try {
        ids.arxiv_id = parse_arxiv_id(text);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedIdentifier) {
            std::size_t pos = util::find_icase(text, "arxiv:");
            std::size_t start = pos + 6;
            while (start < text.size() && text[start] == ' ') {
                ++start;
            }
            std::string_view tok = url_token(text, start);
            ids.malformed_arxiv = std::string(tok.empty() ? text.substr(pos, 6) : tok);
        }
    }

    std::size_t http = text.find("http");
    while (http != std::string_view::npos) {
        if (text.substr(http, 7) == "http://" || text.substr(http, 8) == "https://") {
            break;
        }
        http = text.find("http", http + 4);
    }
    if (http != std::string_view::npos) {
        std::string url(url_token(text, http));
        ids.url = url;
        for (std::string_view host : {std::string_view("arxiv.org/abs/"), std::string_view("arxiv.org/pdf/")}) {
            std::size_t at = url.find(host);
            if (at != std::string::npos && !ids.arxiv_id) {
                std::string id = url.substr(at + host.size());
                if (id.ends_with(".pdf")) {
                    id.resize(id.size() - 4);
                }
                if (auto parsed = parse_bare_arxiv_id(id)) {
                    ids.arxiv_id = parsed;
                    ids.malformed_arxiv.reset();
                }
            }
        }
        for (std::string_view host : {std::string_view("aclanthology.org/"), std::string_view("aclweb.org/anthology/")}) {
            std::size_t at = url.find(host);
            if (at != std::string::npos) {
                std::string id = url.substr(at + host.size());
                while (!id.empty() && id.back() == '/') {
                    id.pop_back();
                }
                if (id.ends_with(".pdf")) {
                    id.resize(id.size() - 4);
                }
                if (!id.empty() && id.find('/') == std::string::npos) {
                    ids.acl_id = id;
                }
            }
        }
    }

    static const std::regex doi_re(R"((10\.\d{4,9}/[^\s]+))");
    std::cmatch m;
    if (std::regex_search(text.data(), text.data() + text.size(), m, doi_re)) {
        std::string_view doi(m[1].first, static_cast<std::size_t>(m[1].length()));
        while (!doi.empty() && (doi.back() == '.' || doi.back() == ',' || doi.back() == ')' || doi.back() == ';')) {
            doi.remove_suffix(1);
        }
        ids.doi = std::string(doi);
    }
    return ids;
}

/// IEEE-style: Authors, “Title,” Venue, Year.
bool parse_quoted(std::string_view text, ParsedReference& out)
{
    struct Quote {
        std::string_view open;
        std::string_view close;
    };
    for (Quote q : {Quote {"“", "”"}, Quote {"\"", "\""}}) {
        std::size_t open = text.find(q.open);
        if (open == std::string_view::npos) {
            continue;
        }
        std::size_t inner = open + q.open.size();
        std::size_t close = text.find(q.close, inner);
        if (close == std::string_view::npos || close - inner < 10) {
            continue;
        }
        std::string_view title = strip_title_punct(text.substr(inner, close - inner));
        if (title.empty()) {
            continue;
        }
        out.title = std::string(title);
        out.authors = split_authors(text.substr(0, open), text);
        std::string_view tail = text.substr(close + q.close.size());
        while (!tail.empty() && (tail.front() == ',' || tail.front() == ' ')) {
            tail.remove_prefix(1);
        }
        if (util::starts_with_icase(tail, "in ")) {
            tail.remove_prefix(3);
        }
        auto vp = parse_tail(tail);
        if (vp.venue) {
            // Venue stops at the first comma in this style.
            std::string v = *vp.venue;
            if (auto comma = v.find(", "); comma != std::string::npos) {
                v.resize(comma);
            }
            out.venue = v;
        }
        out.pages = vp.pages;
        out.year = last_standalone_year(tail);
        return true;
    }
    return false;
}

} // namespace

ParsedReference parse_reference(const RawReference& raw)
{
    ParsedReference out;
    out.raw_ref = raw;
    std::string text_owned = util::collapse_whitespace(raw.raw);
    std::string_view text = text_owned;
    if (text.size() < kMinParsableLength) {
        return out;
    }
    out.identifiers = extract_identifiers(text);
    std::string_view body = strip_label(text);

    auto ys = detail::find_year_sentence(body);
    if (ys && !detail::looks_like_author_list(body.substr(0, ys->authors_end))) {
        // Quoted titles take precedence over a dubious opener.
        if (parse_quoted(body, out)) {
            return out;
        }
    }
    if (!ys) {
        if (!parse_quoted(body, out)) {
            out.year = last_standalone_year(body);
        }
        return out;
    }

    out.authors = split_authors(body.substr(0, ys->authors_end), text);
    if (year_in_range(ys->year)) {
        out.year = ys->year;
    }
    std::string_view rest = body.substr(ys->after);
    TitleSplit split = split_title(rest);
    std::string_view title = strip_title_punct(split.title);
    // A title never begins with a venue marker.
    if (!title.empty() && !title.starts_with("arXiv preprint") && !title.starts_with("In Proceedings")) {
        out.title = std::string(title);
        auto vp = parse_tail(split.tail);
        out.venue = vp.venue;
        out.pages = vp.pages;
    } else {
        auto vp = parse_tail(rest);
        out.venue = vp.venue;
        out.pages = vp.pages;
    }
    return out;
}

} // namespace hallucheck

#include "hallucheck/matcher.hpp"
#include "hallucheck/util.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

namespace hallucheck {

namespace {

const icu::Normalizer2& nfkc_casefold()
{
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
        if (U_FAILURE(status) || n == nullptr) {
            throw std::runtime_error("ICU NFKC_Casefold normalizer unavailable");
        }
        return n;
    }();
    return *instance;
}

void push_char(NormalizedTitle& out, char32_t c, bool& pending_space)
{
    if (pending_space && !out.chars.empty()) {
        out.chars.push_back(U' ');
    }
    pending_space = false;
    out.chars.push_back(c);
}

} // namespace

NormalizedTitle normalize_title(std::string_view title)
{
    NormalizedTitle out;
    bool pending_space = false;
    bool ascii = std::all_of(title.begin(), title.end(),
                             [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii) {
        for (char c : title) {
            if (c >= 'A' && c <= 'Z') {
                push_char(out, static_cast<char32_t>(c - 'A' + 'a'), pending_space);
            } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
                push_char(out, static_cast<char32_t>(c), pending_space);
            } else {
                pending_space = true;
            }
        }
    } else {
        UErrorCode status = U_ZERO_ERROR;
        icu::UnicodeString folded = nfkc_casefold().normalize(
            icu::UnicodeString::fromUTF8(icu::StringPiece(title.data(), static_cast<int32_t>(title.size()))),
            status);
        if (U_FAILURE(status)) {
            folded = icu::UnicodeString::fromUTF8(icu::StringPiece(title.data(), static_cast<int32_t>(title.size())));
        }
        for (int32_t i = 0; i < folded.length(); i = folded.moveIndex32(i, 1)) {
            UChar32 c = folded.char32At(i);
            if (u_isalnum(c)) {
                push_char(out, static_cast<char32_t>(c), pending_space);
            } else {
                pending_space = true;
            }
        }
    }
    out.text = util::encode_utf8(out.chars);
    return out;
}

} // namespace hallucheck

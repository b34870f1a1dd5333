#include "xml_stream.hpp"

#include "hallucheck/error.hpp"
#include "hallucheck/util.hpp"

#include <expat.h>

#include <array>
#include <cstdio>
#include <memory>

namespace hallucheck::detail {

namespace {

// Code points 160..255 in order.
constexpr std::array<const char*, 96> kLatin1Names {
    "nbsp", "iexcl", "cent", "pound", "curren", "yen", "brvbar", "sect", "uml", "copy", "ordf",
    "laquo", "not", "shy", "reg", "macr", "deg", "plusmn", "sup2", "sup3", "acute", "micro",
    "para", "middot", "cedil", "sup1", "ordm", "raquo", "frac14", "frac12", "frac34", "iquest",
    "Agrave", "Aacute", "Acirc", "Atilde", "Auml", "Aring", "AElig", "Ccedil", "Egrave", "Eacute",
    "Ecirc", "Euml", "Igrave", "Iacute", "Icirc", "Iuml", "ETH", "Ntilde", "Ograve", "Oacute",
    "Ocirc", "Otilde", "Ouml", "times", "Oslash", "Ugrave", "Uacute", "Ucirc", "Uuml", "Yacute",
    "THORN", "szlig", "agrave", "aacute", "acirc", "atilde", "auml", "aring", "aelig", "ccedil",
    "egrave", "eacute", "ecirc", "euml", "igrave", "iacute", "icirc", "iuml", "eth", "ntilde",
    "ograve", "oacute", "ocirc", "otilde", "ouml", "divide", "oslash", "ugrave", "uacute", "ucirc",
    "uuml", "yacute", "thorn", "yuml",
};

struct ParserDeleter {
    void operator()(XML_Parser p) const noexcept { XML_ParserFree(p); }
};

class Session {
public:
    Session(const XmlHandlers& handlers, std::string label) : handlers_(handlers), label_(std::move(label))
    {
        parser_.reset(XML_ParserCreate("UTF-8"));
        if (!parser_) {
            throw Error(ErrorCode::XmlError, label_ + ": cannot create XML parser");
        }
        XML_SetUserData(parser_.get(), this);
        XML_SetElementHandler(parser_.get(), &Session::on_start, &Session::on_end);
        XML_SetCharacterDataHandler(parser_.get(), &Session::on_text);
        XML_SetSkippedEntityHandler(parser_.get(), &Session::on_skipped);
    }

    void feed(const char* data, std::size_t len, bool final)
    {
        if (XML_Parse(parser_.get(), data, static_cast<int>(len), final ? 1 : 0) == XML_STATUS_ERROR) {
            if (!pending_.empty()) {
                throw Error(ErrorCode::XmlError, label_ + ": " + pending_);
            }
            throw Error(ErrorCode::XmlError,
                        label_ + ": " + XML_ErrorString(XML_GetErrorCode(parser_.get())) + " at byte "
                            + std::to_string(XML_GetCurrentByteIndex(parser_.get())));
        }
    }

private:
    static void on_start(void* self, const XML_Char* name, const XML_Char** atts)
    {
        auto* s = static_cast<Session*>(self);
        if (!s->handlers_.start) {
            return;
        }
        s->attrs_.clear();
        for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
            s->attrs_.emplace_back(atts[i], atts[i + 1]);
        }
        s->guard([&] { s->handlers_.start(name, s->attrs_); });
    }

    static void on_end(void* self, const XML_Char* name)
    {
        auto* s = static_cast<Session*>(self);
        if (s->handlers_.end) {
            s->guard([&] { s->handlers_.end(name); });
        }
    }

    static void on_text(void* self, const XML_Char* text, int len)
    {
        auto* s = static_cast<Session*>(self);
        if (s->handlers_.text) {
            s->guard([&] { s->handlers_.text(std::string_view(text, static_cast<std::size_t>(len))); });
        }
    }

    static void on_skipped(void* self, const XML_Char* name, int is_parameter)
    {
        auto* s = static_cast<Session*>(self);
        if (is_parameter || !s->handlers_.text) {
            return;
        }
        std::string_view n(name);
        for (std::size_t i = 0; i < kLatin1Names.size(); ++i) {
            if (n == kLatin1Names[i]) {
                std::string utf8;
                util::append_utf8(utf8, static_cast<char32_t>(160 + i));
                s->guard([&] { s->handlers_.text(utf8); });
                return;
            }
        }
    }

    // Exceptions must not cross expat's C frames.
    template <class F>
    void guard(F&& f)
    {
        try {
            f();
        } catch (const std::exception& e) {
            pending_ = e.what();
            XML_StopParser(parser_.get(), XML_FALSE);
        }
    }

    const XmlHandlers& handlers_;
    std::string label_;
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser_;
    XmlAttributes attrs_;
    std::string pending_;
};

} // namespace

void parse_xml_file(const std::string& path, const XmlHandlers& handlers)
{
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!file) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    Session session(handlers, path);
    std::vector<char> buffer(1 << 16);
    while (true) {
        std::size_t n = std::fread(buffer.data(), 1, buffer.size(), file.get());
        if (std::ferror(file.get())) {
            throw Error(ErrorCode::IoError, "read failed: " + path);
        }
        bool final = n < buffer.size();
        session.feed(buffer.data(), n, final);
        if (final) {
            break;
        }
    }
}

void parse_xml_string(std::string_view xml, const std::string& label, const XmlHandlers& handlers)
{
    Session session(handlers, label);
    session.feed(xml.data(), xml.size(), true);
}

std::string_view attribute(const XmlAttributes& attrs, std::string_view name)
{
    for (const auto& [k, v] : attrs) {
        if (k == name) {
            return v;
        }
    }
    return {};
}

} // namespace hallucheck::detail

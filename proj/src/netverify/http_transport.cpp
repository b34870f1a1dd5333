#include "hallucheck/error.hpp"
#include "hallucheck/netverify.hpp"

#include <httplib.h>

namespace hallucheck {

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

    HttpResponse get(const std::string& host, const std::string& target) override
    {
        httplib::Client client("https://" + host);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_follow_location(true);
        httplib::Headers headers {{"User-Agent", "hallucheck/0.1"}, {"Accept", "application/json"}};
        auto res = client.Get(target, headers);
        if (!res) {
            throw Error(ErrorCode::NetworkError, host + ": " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    std::chrono::seconds timeout_;
};

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout)
{
    return std::make_unique<HttplibTransport>(timeout);
}

} // namespace hallucheck

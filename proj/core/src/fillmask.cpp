#include "pseudo/fillmask.hpp"

#include <atomic>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace pseudo {

namespace {

using nlohmann::json;

std::size_t count_occurrences(const std::string& text,
                              const std::string& needle) {
    if (needle.empty())
        return 0;
    std::size_t n = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

FillMaskClient::FillMaskClient(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
    std::string hostport = endpoint_;
    if (hostport.rfind("http://", 0) == 0)
        hostport = hostport.substr(7);
    std::size_t colon = hostport.rfind(':');
    if (colon == std::string::npos)
        fail("fill-mask endpoint must be host:port, got '", endpoint_, "'");
    host_ = hostport.substr(0, colon);
    std::string_view port_text = std::string_view(hostport).substr(colon + 1);
    auto [p, ec] = std::from_chars(port_text.data(),
                                   port_text.data() + port_text.size(), port_);
    if (ec != std::errc() || p != port_text.data() + port_text.size() ||
        port_ <= 0 || port_ > 65535)
        fail("bad fill-mask endpoint port in '", endpoint_, "'");
}

FillMaskResponse FillMaskClient::fill(const FillMaskRequest& req) const {
    if (req.top_k < 1)
        throw FillMaskError(FillMaskError::Kind::Protocol,
                            cat("top_k must be >= 1, got ", req.top_k));
    if (count_occurrences(req.text, req.mask_marker) != 1)
        throw FillMaskError(
            FillMaskError::Kind::Protocol,
            cat("request text must contain the marker '", req.mask_marker,
                "' exactly once"));

    json body = {{"text", req.text},
                 {"mask_marker", req.mask_marker},
                 {"top_k", req.top_k}};

    httplib::Client client(host_, port_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    auto res = client.Post("/fill", body.dump(), "application/json");
    if (!res)
        throw FillMaskError(FillMaskError::Kind::Transport,
                            cat("fill-mask backend unreachable at ",
                                endpoint_, ": ", to_string(res.error())));
    if (res->status != 200)
        throw FillMaskError(
            FillMaskError::Kind::Protocol,
            cat("fill-mask backend returned HTTP ", res->status));

    FillMaskResponse out;
    try {
        json parsed = json::parse(res->body);
        for (const json& c : parsed.at("candidates")) {
            FillMaskCandidate cand;
            cand.token = c.at("token").get<std::string>();
            cand.score = c.at("score").get<double>();
            out.candidates.push_back(std::move(cand));
        }
    } catch (const json::exception& e) {
        throw FillMaskError(FillMaskError::Kind::Protocol,
                            cat("malformed fill-mask response: ", e.what()));
    }
    if (out.candidates.empty())
        throw FillMaskError(FillMaskError::Kind::Protocol,
                            "fill-mask backend returned no candidates");
    for (std::size_t i = 1; i < out.candidates.size(); ++i) {
        if (out.candidates[i].score > out.candidates[i - 1].score)
            throw FillMaskError(
                FillMaskError::Kind::Protocol,
                "fill-mask candidates not sorted by descending score");
    }
    return out;
}

bool FillMaskClient::healthy() const {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    auto res = client.Get("/healthz");
    return res && res->status == 200;
}

struct FillMaskStubServer::Impl {
    std::vector<FillMaskCandidate> canned;
    httplib::Server server;
    std::thread thread;
    std::atomic<std::size_t> requests{0};

    explicit Impl(std::vector<FillMaskCandidate> c) : canned(std::move(c)) {
        server.Get("/healthz", [](const httplib::Request&,
                                  httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });
        server.Post("/fill", [this](const httplib::Request& req,
                                    httplib::Response& res) {
            ++requests;
            int top_k = 1;
            try {
                json body = json::parse(req.body);
                top_k = body.value("top_k", 1);
            } catch (const json::exception&) {
                res.status = 400;
                res.set_content("{\"error\":\"bad json\"}",
                                "application/json");
                return;
            }
            json candidates = json::array();
            for (const FillMaskCandidate& c : canned) {
                if (static_cast<int>(candidates.size()) >= top_k)
                    break;
                candidates.push_back(
                    {{"token", c.token}, {"score", c.score}});
            }
            json out = {{"candidates", candidates}};
            res.set_content(out.dump(), "application/json");
        });
    }
};

FillMaskStubServer::FillMaskStubServer(std::vector<FillMaskCandidate> canned)
    : impl_(std::make_unique<Impl>(std::move(canned))) {}

FillMaskStubServer::~FillMaskStubServer() {
    stop();
}

int FillMaskStubServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ < 0)
            fail("stub server: cannot bind to ", host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            fail("stub server: cannot bind to ", host, ":", port);
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void FillMaskStubServer::stop() {
    if (!impl_)
        return;
    impl_->server.stop();
    if (impl_->thread.joinable())
        impl_->thread.join();
}

bool FillMaskStubServer::listen_forever(const std::string& host, int port) {
    port_ = port;
    return impl_->server.listen(host, port);
}

std::size_t FillMaskStubServer::request_count() const {
    return impl_->requests.load();
}

}  // namespace pseudo

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pseudo/error.hpp"

namespace pseudo {

/// Wire protocol: HTTP POST /fill with JSON body
///   {"text": "...", "mask_marker": "[MASK]", "top_k": k}
/// response
///   {"candidates": [{"token": "...", "score": s}, ...]}
/// plus GET /healthz -> 200.  The request text must contain the marker
/// exactly once; response candidates are sorted by descending score and
/// must be non-empty on success.

struct FillMaskRequest {
    std::string text;
    std::string mask_marker = "[MASK]";
    int top_k = 1;
};

struct FillMaskCandidate {
    std::string token;
    double score = 0.0;
};

struct FillMaskResponse {
    std::vector<FillMaskCandidate> candidates;
    const FillMaskCandidate& top() const { return candidates.front(); }
};

class FillMaskError : public Error {
public:
    enum class Kind {
        Transport,  // connect / timeout / socket failure
        Protocol,   // bad status, malformed payload, empty candidate list
    };

    FillMaskError(Kind kind, const std::string& what)
        : Error(what), kind(kind) {}

    Kind kind;
};

/// Minimal blocking client for the fill-mask service.  Stateless; safe to
/// share across threads (each call opens its own connection).
class FillMaskClient {
public:
    /// endpoint: "host:port" or "http://host:port".
    explicit FillMaskClient(std::string endpoint, int timeout_ms = 5000);

    /// Throws FillMaskError on transport or protocol failure.  Validates
    /// that the request marker occurs exactly once and that the response
    /// is non-empty with non-increasing scores.
    FillMaskResponse fill(const FillMaskRequest& req) const;

    /// GET /healthz -> true on 200.
    bool healthy() const;

    const std::string& endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
    std::string host_;
    int port_ = 0;
    int timeout_ms_;
};

/// In-process stub implementing the fill-mask protocol with canned
/// responses; backs the `stub-server` subcommand and the test suites.
class FillMaskStubServer {
public:
    explicit FillMaskStubServer(std::vector<FillMaskCandidate> canned);
    ~FillMaskStubServer();

    FillMaskStubServer(const FillMaskStubServer&) = delete;
    FillMaskStubServer& operator=(const FillMaskStubServer&) = delete;

    /// Bind and serve on a background thread.  port 0 picks a free port.
    /// Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

    /// Serve on the calling thread until stop() (CLI mode).
    bool listen_forever(const std::string& host, int port);

    int port() const { return port_; }
    std::size_t request_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace pseudo

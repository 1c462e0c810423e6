#pragma once

#include <memory>
#include <string>

#include "metafair/harness.hpp"

namespace metafair::serve {

/// HTTP service exposing one endpoint per pipeline stage:
///   GET  /health    -> {status, version}
///   POST /generate  -> campaign fragment in, tests out
///   POST /execute   -> tests + model in, execution records out
///   POST /evaluate  -> tests + records in, verdicts out
/// Bodies use the same JSON schemas as the stage files. Schema violations
/// yield 400, upstream provider failures 502, both with machine-readable
/// error bodies.
class Service {
public:
    explicit Service(harness::HarnessConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. port 0 picks an ephemeral
    /// port; the chosen one is returned.
    int start(const std::string& host = "127.0.0.1", int port = 0);

    /// Serves on the calling thread until stop() (the CLI path).
    void run(const std::string& host, int port);

    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace metafair::serve

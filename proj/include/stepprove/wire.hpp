#pragma once

#include <iosfwd>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stepprove/env.hpp"

namespace stepprove {

// Newline-delimited JSON over stdin/stdout, one object per line:
//   -> {"cmd":"init","statement":"A -> A"}
//   <- {"ok":true,"state_id":"s0","goals":[{"hyps":[],"target":"A -> A"}],"complete":false}
//   -> {"cmd":"apply","state_id":"s0","tactic":"intro h"}
//   <- same shape, or {"ok":false,"error":"inapplicable","message":"..."}
//   -> {"cmd":"shutdown"}    <- {"ok":true}

std::string wire_init_request(const std::string& statement);
std::string wire_apply_request(const std::string& state_id, const std::string& tactic);
std::string wire_shutdown_request();

std::string wire_success_response(const EnvState& state);
std::string wire_error_response(ErrorClass cls, const std::string& message);
std::string wire_shutdown_response();

// Parses a peer response line; malformed lines become Transport errors.
// `depth` is stamped onto the resulting state (the wire carries no depth).
EnvResult parse_wire_response(const std::string& line, int depth);

// Handles one request line against a session; returns the response line and
// sets `shutdown` when the peer asked to stop.
std::string handle_wire_request(KernelSession& session, const std::string& line, bool& shutdown);

// Blocking serve loop for `env serve`: one request per line until shutdown
// or EOF. Returns the process exit code.
int serve_kernel(std::istream& in, std::ostream& out);

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Environment adapter over a child process speaking the wire protocol.
// Requests are serialized; one in-flight request per child.
class ProcessEnvironment : public Environment {
public:
    explicit ProcessEnvironment(std::vector<std::string> argv);
    ~ProcessEnvironment() override;

    ProcessEnvironment(const ProcessEnvironment&) = delete;
    ProcessEnvironment& operator=(const ProcessEnvironment&) = delete;

    EnvResult init(const std::string& statement) override;
    EnvResult apply(const std::string& state_id, const std::string& tactic) override;

    // Raw request/response exchange; exposed for protocol conformance tests.
    std::string roundtrip(const std::string& request_line);

private:
    std::string exchange_line(const std::string& request_line);
    void shutdown_child();

    std::mutex mutex_;
    int child_pid_ = -1;
    int to_child_ = -1;    // write end
    int from_child_ = -1;  // read end
    std::string read_buffer_;
    // adapter-side depth tracking: the wire format does not carry depth
    std::unordered_map<std::string, int> depths_;
};

}  // namespace stepprove

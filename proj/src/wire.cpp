#include "stepprove/wire.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace stepprove {

using json = nlohmann::ordered_json;

namespace {

json goals_to_json(const EnvState& state) {
    json goals = json::array();
    for (const auto& g : state.goals) {
        json hyps = json::array();
        for (const auto& [name, formula] : g.hyps) hyps.push_back(json::array({name, formula}));
        goals.push_back(json{{"hyps", std::move(hyps)}, {"target", g.target}});
    }
    return goals;
}

}  // namespace

std::string wire_init_request(const std::string& statement) {
    return json{{"cmd", "init"}, {"statement", statement}}.dump();
}

std::string wire_apply_request(const std::string& state_id, const std::string& tactic) {
    return json{{"cmd", "apply"}, {"state_id", state_id}, {"tactic", tactic}}.dump();
}

std::string wire_shutdown_request() { return json{{"cmd", "shutdown"}}.dump(); }

std::string wire_success_response(const EnvState& state) {
    return json{{"ok", true},
                {"state_id", state.id},
                {"goals", goals_to_json(state)},
                {"complete", state.complete()}}
        .dump();
}

std::string wire_error_response(ErrorClass cls, const std::string& message) {
    return json{{"ok", false}, {"error", error_class_name(cls)}, {"message", message}}.dump();
}

std::string wire_shutdown_response() { return json{{"ok", true}}.dump(); }

EnvResult parse_wire_response(const std::string& line, int depth) {
    json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || !msg.contains("ok") || !msg["ok"].is_boolean())
        return EnvResult::failure(ErrorClass::Transport, "malformed peer message: " + line);
    if (!msg["ok"].get<bool>()) {
        std::string cls_name = msg.value("error", "");
        std::string message = msg.value("message", "");
        auto cls = error_class_from_name(cls_name);
        if (!cls)
            return EnvResult::failure(ErrorClass::Transport,
                                      "peer reported unknown error class '" + cls_name + "'");
        return EnvResult::failure(*cls, message);
    }
    if (!msg.contains("state_id") || !msg["state_id"].is_string() || !msg.contains("goals") ||
        !msg["goals"].is_array())
        return EnvResult::failure(ErrorClass::Transport, "peer success message missing fields");
    EnvState state;
    state.id = msg["state_id"].get<std::string>();
    state.depth = depth;
    for (const auto& g : msg["goals"]) {
        if (!g.is_object() || !g.contains("hyps") || !g.contains("target"))
            return EnvResult::failure(ErrorClass::Transport, "malformed goal in peer message");
        EnvGoal goal;
        for (const auto& h : g["hyps"]) {
            if (!h.is_array() || h.size() != 2)
                return EnvResult::failure(ErrorClass::Transport, "malformed hypothesis pair");
            goal.hyps.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
        }
        goal.target = g["target"].get<std::string>();
        state.goals.push_back(std::move(goal));
    }
    return EnvResult::success(std::move(state));
}

std::string handle_wire_request(KernelSession& session, const std::string& line, bool& shutdown) {
    shutdown = false;
    json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object())
        return wire_error_response(ErrorClass::ParseError, "malformed JSON request");
    if (!msg.contains("cmd") || !msg["cmd"].is_string())
        return wire_error_response(ErrorClass::ParseError, "missing 'cmd' field");
    std::string cmd = msg["cmd"].get<std::string>();

    if (cmd == "shutdown") {
        shutdown = true;
        return wire_shutdown_response();
    }
    if (cmd == "init") {
        if (!msg.contains("statement") || !msg["statement"].is_string())
            return wire_error_response(ErrorClass::ParseError, "init requires 'statement'");
        ApplyResult r = session.init(msg["statement"].get<std::string>());
        if (!r.ok()) return wire_error_response(r.error().cls, r.error().message);
        return wire_success_response(to_env_state(r.state()));
    }
    if (cmd == "apply") {
        if (!msg.contains("state_id") || !msg["state_id"].is_string() ||
            !msg.contains("tactic") || !msg["tactic"].is_string())
            return wire_error_response(ErrorClass::ParseError,
                                       "apply requires 'state_id' and 'tactic'");
        ApplyResult r = session.apply(msg["state_id"].get<std::string>(),
                                      msg["tactic"].get<std::string>());
        if (!r.ok()) return wire_error_response(r.error().cls, r.error().message);
        return wire_success_response(to_env_state(r.state()));
    }
    return wire_error_response(ErrorClass::ParseError, "unknown command '" + cmd + "'");
}

int serve_kernel(std::istream& in, std::ostream& out) {
    KernelSession session;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        bool shutdown = false;
        out << handle_wire_request(session, line, shutdown) << '\n' << std::flush;
        if (shutdown) return 0;
    }
    return 0;
}

// ---------- ProcessEnvironment ----------

ProcessEnvironment::ProcessEnvironment(std::vector<std::string> argv) {
    if (argv.empty()) throw TransportError("empty child command line");
    signal(SIGPIPE, SIG_IGN);  // a dead peer must surface as a transport error

    int to_child_pipe[2];
    int from_child_pipe[2];
    if (pipe(to_child_pipe) != 0 || pipe(from_child_pipe) != 0)
        throw TransportError(std::string("pipe: ") + std::strerror(errno));

    pid_t pid = fork();
    if (pid < 0) throw TransportError(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        dup2(to_child_pipe[0], STDIN_FILENO);
        dup2(from_child_pipe[1], STDOUT_FILENO);
        close(to_child_pipe[0]);
        close(to_child_pipe[1]);
        close(from_child_pipe[0]);
        close(from_child_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (auto& a : argv) args.push_back(a.data());
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }

    child_pid_ = pid;
    close(to_child_pipe[0]);
    close(from_child_pipe[1]);
    to_child_ = to_child_pipe[1];
    from_child_ = from_child_pipe[0];
}

ProcessEnvironment::~ProcessEnvironment() { shutdown_child(); }

void ProcessEnvironment::shutdown_child() {
    if (child_pid_ < 0) return;
    // best-effort polite shutdown; ignore a peer that already exited
    std::string req = wire_shutdown_request() + "\n";
    (void)!write(to_child_, req.data(), req.size());
    close(to_child_);
    close(from_child_);
    int status = 0;
    waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
}

std::string ProcessEnvironment::exchange_line(const std::string& request_line) {
    std::string framed = request_line + "\n";
    std::size_t written = 0;
    while (written < framed.size()) {
        ssize_t n = write(to_child_, framed.data() + written, framed.size() - written);
        if (n <= 0) throw TransportError("write to child failed");
        written += static_cast<std::size_t>(n);
    }
    for (;;) {
        std::size_t nl = read_buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = read_buffer_.substr(0, nl);
            read_buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n <= 0) throw TransportError("child closed the stream");
        read_buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string ProcessEnvironment::roundtrip(const std::string& request_line) {
    std::lock_guard<std::mutex> lock(mutex_);
    return exchange_line(request_line);
}

EnvResult ProcessEnvironment::init(const std::string& statement) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string line;
    try {
        line = exchange_line(wire_init_request(statement));
    } catch (const TransportError& e) {
        return EnvResult::failure(ErrorClass::Transport, e.what());
    }
    EnvResult r = parse_wire_response(line, 0);
    if (r.ok()) depths_[r.state().id] = 0;
    return r;
}

EnvResult ProcessEnvironment::apply(const std::string& state_id, const std::string& tactic) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string line;
    try {
        line = exchange_line(wire_apply_request(state_id, tactic));
    } catch (const TransportError& e) {
        return EnvResult::failure(ErrorClass::Transport, e.what());
    }
    auto it = depths_.find(state_id);
    int parent_depth = it == depths_.end() ? 0 : it->second;
    EnvResult r = parse_wire_response(line, parent_depth + 1);
    if (r.ok()) depths_[r.state().id] = parent_depth + 1;
    return r;
}

}  // namespace stepprove

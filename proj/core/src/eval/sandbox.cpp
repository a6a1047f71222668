#include "ael/eval/sandbox.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include <json.hpp>

namespace ael::eval {

namespace {

using nlohmann::json;

int remaining_ms(GuestProcess::Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - GuestProcess::Clock::now());
    return static_cast<int>(std::max<long long>(0, left.count()));
}

}  // namespace

std::string encode_load(std::string_view source) {
    return json{{"type", "load"}, {"source", std::string(source)}}.dump();
}

std::string encode_solve(std::string_view instance_id, const tsp::Instance& instance, tsp::NodeId start) {
    json coords = json::array();
    for (const auto& p : instance.coords()) {
        coords.push_back({p.x, p.y});
    }
    return json{{"type", "solve"},
                {"instance_id", std::string(instance_id)},
                {"n", instance.size()},
                {"coords", std::move(coords)},
                {"start", start}}
        .dump();
}

std::string encode_shutdown() { return json{{"type", "shutdown"}}.dump(); }

GuestReply decode_reply(std::string_view line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception&) {
        throw ProtocolError("guest sent a non-JSON line: " + std::string(line.substr(0, 200)));
    }
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
        throw ProtocolError("guest reply has no type: " + std::string(line.substr(0, 200)));
    }
    GuestReply reply;
    const auto type = doc["type"].get<std::string>();
    try {
        if (type == "ready") {
            reply.type = GuestReply::Type::Ready;
        } else if (type == "load_error") {
            reply.type = GuestReply::Type::LoadError;
            reply.msg = doc.value("msg", std::string{});
        } else if (type == "tour") {
            reply.type = GuestReply::Type::Tour;
            reply.instance_id = doc.at("instance_id").get<std::string>();
            for (const auto& v : doc.at("order")) {
                if (!v.is_number_integer() || v.get<long long>() < 0) {
                    throw ProtocolError("tour order must hold non-negative integers");
                }
                reply.order.push_back(v.get<tsp::NodeId>());
            }
        } else if (type == "step_error") {
            reply.type = GuestReply::Type::StepError;
            reply.instance_id = doc.value("instance_id", std::string{});
            reply.msg = doc.value("msg", std::string{});
        } else {
            throw ProtocolError("unknown guest reply type '" + type + "'");
        }
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed guest reply: ") + e.what());
    }
    return reply;
}

GuestProcess::GuestProcess(const std::vector<std::string>& argv, bool inherit_stderr) {
    if (argv.empty()) {
        throw SpawnError("guest command is empty");
    }
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        throw SpawnError(std::string("socketpair: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw SpawnError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        if (!inherit_stderr) {
            const int devnull = ::open("/dev/null", O_WRONLY);
            if (devnull >= 0) {
                ::dup2(devnull, STDERR_FILENO);
            }
        }
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    pid_ = pid;
    fd_ = fds[0];
    ::fcntl(fd_, F_SETFL, ::fcntl(fd_, F_GETFL) | O_NONBLOCK);
}

GuestProcess::~GuestProcess() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
    if (!reaped_ && pid_ > 0) {
        kill();
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

bool GuestProcess::send_line(std::string_view line, Clock::time_point deadline) {
    std::string data(line);
    data.push_back('\n');
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<std::size_t>(n);
            continue;
        }
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            pollfd p{fd_, POLLOUT, 0};
            const int ms = remaining_ms(deadline);
            if (ms == 0 || ::poll(&p, 1, ms) == 0) {
                return false;
            }
            continue;
        }
        return false;
    }
    return true;
}

GuestProcess::ReadStatus GuestProcess::read_line(std::string& out, Clock::time_point deadline) {
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            out = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return ReadStatus::Line;
        }
        char chunk[65536];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n > 0) {
            buffer_.append(chunk, static_cast<std::size_t>(n));
            continue;
        }
        if (n == 0) {
            return ReadStatus::Closed;
        }
        if (errno == EINTR) {
            continue;
        }
        if (errno != EAGAIN && errno != EWOULDBLOCK) {
            return ReadStatus::Closed;
        }
        pollfd p{fd_, POLLIN, 0};
        const int ms = remaining_ms(deadline);
        if (ms == 0) {
            return ReadStatus::Timeout;
        }
        const int ready = ::poll(&p, 1, ms);
        if (ready == 0) {
            return ReadStatus::Timeout;
        }
    }
}

void GuestProcess::kill() {
    if (pid_ > 0 && !reaped_) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
    }
}

int GuestProcess::wait(Clock::time_point deadline) {
    if (!reaped_) {
        while (true) {
            int status = 0;
            const pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                status_ = status;
                reaped_ = true;
                break;
            }
            if (r < 0 && errno != EINTR) {
                reaped_ = true;
                break;
            }
            if (Clock::now() >= deadline) {
                kill();
                ::waitpid(pid_, &status, 0);
                status_ = status;
                reaped_ = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }
    if (WIFEXITED(status_)) {
        return WEXITSTATUS(status_);
    }
    if (WIFSIGNALED(status_)) {
        return -WTERMSIG(status_);
    }
    return -1;
}

}  // namespace ael::eval

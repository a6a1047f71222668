#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "ael/errors.hpp"
#include "ael/tsp/instance.hpp"

namespace ael::eval {

// Host side of the guest sandbox protocol. Every message is one line of JSON
// over the child's stdin/stdout:
//
//   host -> guest                                     guest -> host
//   {"type":"load","source":S}                        {"type":"ready"}
//                                                     {"type":"load_error","msg":M}
//   {"type":"solve","instance_id":I,"n":N,            {"type":"tour","instance_id":I,"order":[...]}
//    "coords":[[x,y],...],"start":K}                  {"type":"step_error","instance_id":I,"msg":M}
//   {"type":"shutdown"}                               (process exits 0)
//
// Coordinates are sent with round-trip precision; guests compute distances
// as sqrt(dx*dx + dy*dy) and present unvisited nodes in ascending order.

std::string encode_load(std::string_view source);
std::string encode_solve(std::string_view instance_id, const tsp::Instance& instance, tsp::NodeId start);
std::string encode_shutdown();

struct GuestReply {
    enum class Type { Ready, LoadError, Tour, StepError };
    Type type = Type::Ready;
    std::string instance_id;
    std::vector<tsp::NodeId> order;
    std::string msg;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Throws ProtocolError for lines that are not a known reply.
GuestReply decode_reply(std::string_view line);

class SpawnError : public Error {
public:
    using Error::Error;
};

/// A child process connected over a socket pair to its stdin and stdout.
/// The child runs in its own process group; the destructor kills the group
/// and reaps it.
class GuestProcess {
public:
    using Clock = std::chrono::steady_clock;

    explicit GuestProcess(const std::vector<std::string>& argv, bool inherit_stderr = false);
    ~GuestProcess();

    GuestProcess(const GuestProcess&) = delete;
    GuestProcess& operator=(const GuestProcess&) = delete;

    /// Writes `line` plus a newline. Returns false on deadline or a closed peer.
    bool send_line(std::string_view line, Clock::time_point deadline);

    enum class ReadStatus { Line, Timeout, Closed };
    /// Reads one line (without the newline) into `out`.
    ReadStatus read_line(std::string& out, Clock::time_point deadline);

    void kill();
    /// Waits for exit up to `deadline`, killing the child if it is still
    /// running. Returns the exit code, or -signal for signalled children.
    int wait(Clock::time_point deadline);

    pid_t pid() const noexcept { return pid_; }

private:
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buffer_;
    bool reaped_ = false;
    int status_ = 0;
};

}  // namespace ael::eval

#pragma once

#include <memory>
#include <string>
#include <sys/types.h>

namespace promptseg {

/// Bidirectional newline-delimited byte stream to a model server.
class LineChannel {
  public:
    virtual ~LineChannel() = default;

    /// Appends '\n'. Throws BackendError when the peer is gone.
    virtual void send_line(std::string const& line) = 0;
    /// Blocks for one line, '\n' stripped. Throws BackendError on EOF.
    virtual std::string receive_line() = 0;
    virtual std::string describe() const = 0;
};

/// Runs `command` through /bin/sh with its stdin/stdout wired to the channel.
/// stderr is inherited.
std::unique_ptr<LineChannel> spawn_process(std::string const& command);

/// Connects to "host:port".
std::unique_ptr<LineChannel> connect_tcp(std::string const& address);

/// Line I/O over an already-open pair of descriptors (not owned). Used by
/// servers talking over their own standard streams.
std::unique_ptr<LineChannel> wrap_descriptors(int read_fd, int write_fd, std::string name);

} // namespace promptseg

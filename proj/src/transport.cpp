#include "promptseg/transport.hpp"

#include "promptseg/error.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace promptseg {

namespace {

void ignore_sigpipe()
{
    static bool const done = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

class FdChannel : public LineChannel {
  public:
    FdChannel(int read_fd, int write_fd, std::string name, bool owned)
        : read_fd_(read_fd), write_fd_(write_fd), name_(std::move(name)), owned_(owned)
    {
    }

    ~FdChannel() override { close_fds(); }

    void send_line(std::string const& line) override
    {
        std::string buf = line;
        buf += '\n';
        std::size_t off = 0;
        while (off < buf.size()) {
            auto const n = ::write(write_fd_, buf.data() + off, buf.size() - off);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw BackendError(fmt::format("{}: write failed: {}", name_, std::strerror(errno)));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    std::string receive_line() override
    {
        for (;;) {
            auto const nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            char chunk[65536];
            auto const n = ::read(read_fd_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw BackendError(fmt::format("{}: read failed: {}", name_, std::strerror(errno)));
            }
            if (n == 0) {
                throw BackendError(fmt::format("{}: connection closed by peer", name_));
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    std::string describe() const override { return name_; }

  protected:
    void close_fds()
    {
        if (!owned_) {
            return;
        }
        if (write_fd_ >= 0 && write_fd_ != read_fd_) {
            ::close(write_fd_);
        }
        if (read_fd_ >= 0) {
            ::close(read_fd_);
        }
        read_fd_ = write_fd_ = -1;
    }

    int read_fd_;
    int write_fd_;
    std::string name_;
    bool owned_;
    std::string buffer_;
};

class ProcessChannel : public FdChannel {
  public:
    ProcessChannel(int read_fd, int write_fd, pid_t pid, std::string name)
        : FdChannel(read_fd, write_fd, std::move(name), true), pid_(pid)
    {
    }

    ~ProcessChannel() override
    {
        // Closing stdin asks the server to exit; escalate if it lingers.
        close_fds();
        using namespace std::chrono_literals;
        auto const deadline = std::chrono::steady_clock::now() + 2s;
        int status = 0;
        while (::waitpid(pid_, &status, WNOHANG) == 0) {
            if (std::chrono::steady_clock::now() > deadline) {
                ::kill(-pid_, SIGKILL);
                ::waitpid(pid_, &status, 0);
                break;
            }
            std::this_thread::sleep_for(5ms);
        }
        // The shell may have left the server behind in its group.
        ::kill(-pid_, SIGKILL);
    }

  private:
    pid_t pid_;
};

} // namespace

std::unique_ptr<LineChannel> spawn_process(std::string const& command)
{
    ignore_sigpipe();
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
        throw BackendError(fmt::format("pipe: {}", std::strerror(errno)));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw BackendError(fmt::format("pipe: {}", std::strerror(errno)));
    }
    pid_t const pid = ::fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
            ::close(fd);
        }
        throw BackendError(fmt::format("fork: {}", std::strerror(errno)));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::make_unique<ProcessChannel>(from_child[0], to_child[1], pid, fmt::format("exec:{}", command));
}

std::unique_ptr<LineChannel> connect_tcp(std::string const& address)
{
    ignore_sigpipe();
    auto const colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size()) {
        throw BackendError(fmt::format("tcp address '{}' must be host:port", address));
    }
    std::string host = address.substr(0, colon);
    std::string const port = address.substr(colon + 1);
    if (host.empty()) {
        host = "127.0.0.1";
    }

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
        throw BackendError(fmt::format("tcp:{}: {}", address, ::gai_strerror(rc)));
    }
    int fd = -1;
    int last_errno = 0;
    for (auto* ai = found; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_errno = errno;
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        last_errno = errno;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
        throw BackendError(fmt::format("tcp:{}: connect failed: {}", address, std::strerror(last_errno)));
    }
    return std::make_unique<FdChannel>(fd, fd, fmt::format("tcp:{}", address), true);
}

std::unique_ptr<LineChannel> wrap_descriptors(int read_fd, int write_fd, std::string name)
{
    ignore_sigpipe();
    return std::make_unique<FdChannel>(read_fd, write_fd, std::move(name), false);
}

} // namespace promptseg

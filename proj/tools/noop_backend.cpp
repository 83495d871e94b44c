// Reference model server that answers instantly: empty (or box-filled)
// masks and a fixed detection list. Speaks the protocol on stdin/stdout, or
// on a TCP port with --listen.

#include "promptseg/error.hpp"
#include "promptseg/mask.hpp"
#include "promptseg/protocol.hpp"
#include "promptseg/rle.hpp"
#include "promptseg/transport.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace {

using namespace promptseg;

struct Options {
    std::string model_name = "noop";
    int protocol_version = protocol::version;
    std::string boxes;
    bool fill_box = false;
    double peak_mem_mb = 0.0;
    int fail_after = -1;
    int listen_port = -1;
};

std::vector<BoundingBox> parse_boxes(std::string const& text)
{
    // "x0,y0,x1,y1,conf;..."
    std::vector<BoundingBox> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) {
            continue;
        }
        BoundingBox b;
        char c = 0;
        std::istringstream fields(item);
        if (!(fields >> b.x0 >> c >> b.y0 >> c >> b.x1 >> c >> b.y1 >> c >> b.confidence)) {
            throw std::invalid_argument(fmt::format("bad box '{}'", item));
        }
        out.push_back(b);
    }
    return out;
}

// Returns false when the session must end.
bool serve(LineChannel& channel, Options const& opt, std::vector<BoundingBox> const& boxes)
{
    int segments = 0;
    for (;;) {
        std::string line;
        try {
            line = channel.receive_line();
        } catch (BackendError const&) {
            return true;
        }
        protocol::Message msg;
        try {
            msg = protocol::parse_message(line);
        } catch (BackendError const& e) {
            channel.send_line(protocol::format_message(protocol::Error{"bad_request", e.what()}));
            continue;
        }
        if (auto const* hello = std::get_if<protocol::Hello>(&msg)) {
            if (hello->protocol_version != opt.protocol_version) {
                channel.send_line(protocol::format_message(protocol::Error{
                    "version_mismatch", fmt::format("server speaks protocol {}", opt.protocol_version)}));
                return false;
            }
            channel.send_line(protocol::format_message(protocol::Hello{opt.protocol_version, opt.model_name}));
        } else if (auto const* seg = std::get_if<protocol::Segment>(&msg)) {
            if (opt.fail_after >= 0 && segments >= opt.fail_after) {
                channel.send_line(protocol::format_message(protocol::Error{"injected_failure", "fail-after reached"}));
                return false;
            }
            ++segments;
            BinaryMask mask(seg->width, seg->height);
            if (opt.fill_box && seg->prompts.box) {
                mask = box_mask(seg->width, seg->height, *seg->prompts.box);
            }
            channel.send_line(protocol::format_message(protocol::Mask{encode_mask(mask), 0.0, opt.peak_mem_mb}));
        } else if (auto const* det = std::get_if<protocol::Detect>(&msg)) {
            protocol::Boxes reply;
            for (auto const& b : boxes) {
                if (b.confidence >= det->conf) {
                    reply.boxes.push_back(b);
                }
            }
            channel.send_line(protocol::format_message(reply));
        } else {
            channel.send_line(protocol::format_message(
                protocol::Error{"unexpected", fmt::format("unexpected {}", protocol::verb_of(msg))}));
        }
    }
}

int listen_loop(Options const& opt, std::vector<BoundingBox> const& boxes)
{
    int const fd = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(opt.listen_port));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 4) != 0) {
        std::cerr << "noop backend: cannot listen on port " << opt.listen_port << '\n';
        return 1;
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    // The bound port on stdout lets callers pass --listen 0.
    std::cout << ntohs(addr.sin_port) << std::endl;
    // Exit with the launcher: EOF on stdin ends the server.
    std::thread([] {
        char c;
        while (::read(STDIN_FILENO, &c, 1) > 0) {
        }
        std::_Exit(0);
    }).detach();
    for (;;) {
        int const conn = ::accept(fd, nullptr, nullptr);
        if (conn < 0) {
            continue;
        }
        {
            auto channel = wrap_descriptors(conn, conn, "tcp-client");
            serve(*channel, opt, boxes);
        }
        ::close(conn);
    }
}

} // namespace

int main(int argc, char** argv)
{
    Options opt;
    CLI::App app{"No-op promptseg model server"};
    app.add_option("--model-name", opt.model_name);
    app.add_option("--protocol-version", opt.protocol_version);
    app.add_option("--boxes", opt.boxes, "Detections to report: x0,y0,x1,y1,conf;...");
    app.add_flag("--fill-box", opt.fill_box, "Answer box prompts with the filled box");
    app.add_option("--peak-mem", opt.peak_mem_mb, "Peak memory to self-report (MB)");
    app.add_option("--fail-after", opt.fail_after, "Reply ERROR and exit after N segments");
    app.add_option("--listen", opt.listen_port, "Serve TCP on 127.0.0.1:PORT instead of stdio");
    CLI11_PARSE(app, argc, argv);

    std::vector<BoundingBox> boxes;
    try {
        boxes = parse_boxes(opt.boxes);
    } catch (std::exception const& e) {
        std::cerr << "noop backend: " << e.what() << '\n';
        return 1;
    }
    if (opt.listen_port >= 0) {
        return listen_loop(opt, boxes);
    }
    auto channel = wrap_descriptors(STDIN_FILENO, STDOUT_FILENO, "stdio");
    return serve(*channel, opt, boxes) ? 0 : 1;
}

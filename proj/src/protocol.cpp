#include "promptseg/protocol.hpp"

#include "json_codec.hpp"
#include "promptseg/error.hpp"

#include <fmt/format.h>

namespace promptseg::protocol {

namespace {

using codec::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json payload(Message const& msg)
{
    return std::visit(
        overloaded{
            [](Hello const& m) { return json{{"protocol_version", m.protocol_version}, {"model_name", m.model_name}}; },
            [](Segment const& m) {
                json j{{"image_path", m.image_path},
                       {"width", m.width},
                       {"height", m.height},
                       {"want_memory", m.want_memory}};
                codec::write_prompt_fields(m.prompts, j);
                return j;
            },
            [](Mask const& m) { return json{{"rle", m.rle}, {"infer_ms", m.infer_ms}, {"peak_mem_mb", m.peak_mem_mb}}; },
            [](Detect const& m) { return json{{"image_path", m.image_path}, {"conf", m.conf}}; },
            [](Boxes const& m) {
                json list = json::array();
                for (auto const& b : m.boxes) {
                    list.push_back(codec::box_to_json(b));
                }
                return json{{"boxes", std::move(list)}};
            },
            [](Error const& m) { return json{{"code", m.code}, {"message", m.message}}; },
        },
        msg);
}

} // namespace

std::string_view verb_of(Message const& msg)
{
    return std::visit(overloaded{
                          [](Hello const&) { return std::string_view{"HELLO"}; },
                          [](Segment const&) { return std::string_view{"SEGMENT"}; },
                          [](Mask const&) { return std::string_view{"MASK"}; },
                          [](Detect const&) { return std::string_view{"DETECT"}; },
                          [](Boxes const&) { return std::string_view{"BOXES"}; },
                          [](Error const&) { return std::string_view{"ERROR"}; },
                      },
                      msg);
}

std::string format_message(Message const& msg)
{
    return fmt::format("{} {}", verb_of(msg), payload(msg).dump());
}

Message parse_message(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    auto const space = line.find(' ');
    auto const verb = line.substr(0, space);
    auto const body = space == std::string_view::npos ? std::string_view{"{}"} : line.substr(space + 1);
    try {
        auto const j = json::parse(body);
        if (!j.is_object()) {
            throw BackendError(fmt::format("protocol: {} payload is not an object", verb));
        }
        if (verb == "HELLO") {
            return Hello{j.at("protocol_version").get<int>(), j.value("model_name", std::string{})};
        }
        if (verb == "SEGMENT") {
            return Segment{j.at("image_path").get<std::string>(), j.at("width").get<int>(), j.at("height").get<int>(),
                           codec::read_prompt_fields(j), j.value("want_memory", true)};
        }
        if (verb == "MASK") {
            return Mask{j.at("rle").get<std::string>(), j.value("infer_ms", 0.0), j.value("peak_mem_mb", 0.0)};
        }
        if (verb == "DETECT") {
            return Detect{j.at("image_path").get<std::string>(), j.at("conf").get<double>()};
        }
        if (verb == "BOXES") {
            Boxes out;
            for (auto const& b : j.at("boxes")) {
                out.boxes.push_back(codec::box_from_json(b));
            }
            return out;
        }
        if (verb == "ERROR") {
            return Error{j.value("code", std::string{"unknown"}), j.value("message", std::string{})};
        }
    } catch (json::exception const& e) {
        throw BackendError(fmt::format("protocol: malformed {} message: {}", verb, e.what()));
    } catch (std::invalid_argument const& e) {
        throw BackendError(fmt::format("protocol: malformed {} message: {}", verb, e.what()));
    }
    throw BackendError(fmt::format("protocol: unknown message verb '{}'", verb));
}

} // namespace promptseg::protocol

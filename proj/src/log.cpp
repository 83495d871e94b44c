#include "promptseg/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace promptseg {

void init_logging()
{
    auto logger = spdlog::get("promptseg");
    if (!logger) {
        logger = spdlog::stderr_color_mt("promptseg");
    }
    logger->set_pattern("promptseg: %l: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (char const* env = std::getenv("PROMPTSEG_LOG"); env != nullptr && *env != '\0') {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

} // namespace promptseg

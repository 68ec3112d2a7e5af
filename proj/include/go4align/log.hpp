#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace go4align {

// Library logger; writes to stderr so stdout stays free for protocol output.
std::shared_ptr<spdlog::logger> logger();

}  // namespace go4align

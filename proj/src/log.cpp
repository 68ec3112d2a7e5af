#include "go4align/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace go4align {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("go4align");
    if (existing) return existing;
    return spdlog::stderr_logger_mt("go4align");
  }();
  return instance;
}

}  // namespace go4align

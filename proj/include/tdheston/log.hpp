#pragma once

#include <spdlog/logger.h>

namespace tdheston {

/// Library-wide stderr logger. Level comes from TDHESTON_LOG
/// (trace, debug, info, warn, error, off; default warn).
spdlog::logger& log();

}  // namespace tdheston

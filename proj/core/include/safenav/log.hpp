#pragma once

namespace safenav {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Level comes from the SAFENAV_LOG environment variable
/// (quiet | info | debug); defaults to quiet.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(const char* fmt, ...);
void log_debug(const char* fmt, ...);

}  // namespace safenav

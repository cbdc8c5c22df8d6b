#include "safenav/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace safenav {

namespace {

LogLevel g_level = [] {
  const char* env = std::getenv("SAFENAV_LOG");
  if (!env) return LogLevel::Quiet;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  return LogLevel::Quiet;
}();

void vprint(const char* tag, const char* fmt, va_list args) {
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void log_info(const char* fmt, ...) {
  if (g_level < LogLevel::Info) return;
  va_list args;
  va_start(args, fmt);
  vprint("info", fmt, args);
  va_end(args);
}

void log_debug(const char* fmt, ...) {
  if (g_level < LogLevel::Debug) return;
  va_list args;
  va_start(args, fmt);
  vprint("debug", fmt, args);
  va_end(args);
}

}  // namespace safenav

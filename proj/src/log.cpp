#include "chtumor/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace chtumor::logging {
namespace {

Level parse_env() {
  const char* v = std::getenv("CHTUMOR_LOG");
  if (!v || !*v) return Level::Warn;
  if (std::strcmp(v, "error") == 0) return Level::Error;
  if (std::strcmp(v, "warn") == 0) return Level::Warn;
  if (std::strcmp(v, "info") == 0) return Level::Info;
  if (std::strcmp(v, "debug") == 0) return Level::Debug;
  std::fprintf(stderr, "[chtumor] warn: unknown CHTUMOR_LOG value '%s', using warn\n", v);
  return Level::Warn;
}

const char* level_name(Level lv) {
  switch (lv) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

std::mutex g_mu;

}  // namespace

Level threshold() {
  static const Level lv = parse_env();
  return lv;
}

bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(threshold()); }

void write(Level lv, const std::string& msg) {
  if (!enabled(lv)) return;
  std::lock_guard<std::mutex> lock(g_mu);
  std::fprintf(stderr, "[chtumor] %s: %s\n", level_name(lv), msg.c_str());
}

}  // namespace chtumor::logging

#pragma once

#include <string>

// Leveled stderr logging. The threshold comes from the CHTUMOR_LOG
// environment variable (error|warn|info|debug), default warn.
namespace chtumor::logging {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level threshold();
bool enabled(Level lv);
void write(Level lv, const std::string& msg);

inline void error(const std::string& m) { write(Level::Error, m); }
inline void warn(const std::string& m) { write(Level::Warn, m); }
inline void info(const std::string& m) { write(Level::Info, m); }
inline void debug(const std::string& m) { write(Level::Debug, m); }

}  // namespace chtumor::logging

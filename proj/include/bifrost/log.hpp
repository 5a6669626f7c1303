#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

// Minimal stderr logger. Level comes from the BIFROST_LOG environment
// variable: "debug", "info", or "error" (default "error").

namespace bifrost::log {

enum class Level : int { kDebug = 0, kInfo = 1, kError = 2 };

inline Level threshold() {
  static const Level lvl = [] {
    const char* env = std::getenv("BIFROST_LOG");
    if (env == nullptr) return Level::kError;
    std::string s(env);
    if (s == "debug") return Level::kDebug;
    if (s == "info") return Level::kInfo;
    return Level::kError;
  }();
  return lvl;
}

inline std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

inline void write(Level lvl, const std::string& msg) {
  if (static_cast<int>(lvl) < static_cast<int>(threshold())) return;
  const char* tag = lvl == Level::kDebug ? "debug" : lvl == Level::kInfo ? "info" : "error";
  std::lock_guard<std::mutex> g(sink_mutex());
  std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void debug(const std::string& msg) { write(Level::kDebug, msg); }
inline void info(const std::string& msg) { write(Level::kInfo, msg); }
inline void error(const std::string& msg) { write(Level::kError, msg); }

}  // namespace bifrost::log

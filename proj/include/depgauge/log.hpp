#pragma once

#include <iostream>
#include <mutex>
#include <string>

namespace depgauge::log {

inline std::mutex& mutex() {
    static std::mutex m;
    return m;
}

inline bool& quiet() {
    static bool q = false;
    return q;
}

inline void warn(const std::string& msg) {
    if (quiet()) return;
    std::lock_guard<std::mutex> lock(mutex());
    std::cerr << "[depgauge] warning: " << msg << "\n";
}

inline void info(const std::string& msg) {
    if (quiet()) return;
    std::lock_guard<std::mutex> lock(mutex());
    std::cerr << "[depgauge] " << msg << "\n";
}

}  // namespace depgauge::log

#pragma once

#include <map>
#include <string>
#include <vector>

#include "llgblow/types.hpp"

namespace llgblow {
namespace io {

/// Flat key=value configuration with section prefixes ("phys.a = 0.8").
/// JSON files (detected by a leading '{') are flattened to the same map.
std::map<std::string, std::string> load_config(const std::string& path);

double get_double(const std::map<std::string, std::string>& cfg, const std::string& key, double fallback);
int get_int(const std::map<std::string, std::string>& cfg, const std::string& key, int fallback);
std::string get_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                       const std::string& fallback);
bool get_bool(const std::map<std::string, std::string>& cfg, const std::string& key, bool fallback);

/// Resolves an output path against LLG_OUT when the path is relative.
std::string resolve_output_path(const std::string& name);

/// Fixed-format floating point for deterministic reports.
std::string format_double(double v);

} // namespace io
} // namespace llgblow

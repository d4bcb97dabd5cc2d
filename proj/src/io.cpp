#include "llgblow/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace llgblow {
namespace io {

namespace {

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
    } else if (j.is_string()) {
        out[prefix] = j.get<std::string>();
    } else {
        out[prefix] = j.dump();
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("load_config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::map<std::string, std::string> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        flatten_json(nlohmann::json::parse(text), "", out);
        return out;
    }
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = val;
    }
    return out;
}

double get_double(const std::map<std::string, std::string>& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stod(it->second);
}

int get_int(const std::map<std::string, std::string>& cfg, const std::string& key, int fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stoi(it->second);
}

std::string get_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                       const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

bool get_bool(const std::map<std::string, std::string>& cfg, const std::string& key, bool fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    return it->second == "1" || it->second == "true" || it->second == "yes" || it->second == "on";
}

std::string resolve_output_path(const std::string& name) {
    if (!name.empty() && name[0] == '/') return name;
    const char* base = std::getenv("LLG_OUT");
    if (base == nullptr || base[0] == '\0') return name;
    std::string b(base);
    if (b.back() != '/') b += '/';
    return b + name;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace io
} // namespace llgblow

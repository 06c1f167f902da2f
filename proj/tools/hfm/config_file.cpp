#include "config_file.hpp"

#include <algorithm>
#include <fstream>

#include "hfm/errors.hpp"

namespace hfm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool names_option(const std::string& arg, const std::string& name) {
    const std::string flag = "--" + name;
    return arg == flag || arg.rfind(flag + "=", 0) == 0;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw validation_error(path + ":" + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> out = args;
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config") continue;
        const bool present = std::any_of(args.begin(), args.end(), [&](const std::string& a) { return names_option(a, key); });
        if (present) continue;
        if (value == "true") {
            out.push_back("--" + key);
        } else if (value != "false") {
            out.push_back("--" + key);
            out.push_back(value);
        }
    }
    return out;
}

}  // namespace hfm::cli

#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace hfm::cli {

using json = nlohmann::ordered_json;

// process exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

// options shared by every subcommand
struct common_options {
    std::string config;
    std::string output;
    std::string format = "json";
    unsigned threads = 0;
};

void add_common_options(CLI::App& sub, common_options& c, const std::vector<std::string>& formats = {"json", "csv"});

// every option of a parsed subcommand with its resolved value
json resolved_config(const CLI::App& sub);

// writes text to --output or stdout
void emit(const common_options& c, const std::string& text);

// "# key=value" lines for CSV output
std::string csv_preamble(const std::string& command, const CLI::App& sub);

json envelope(const std::string& command, const CLI::App& sub);

// registers all subcommands; the selected one stores its exit code in *code
void register_commands(CLI::App& app, int* code);
void register_verify(CLI::App& app, int* code);

}  // namespace hfm::cli

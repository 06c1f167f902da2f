#pragma once

#include <string>
#include <vector>

namespace hfm::cli {

// Reads a flat key=value file ('#' starts a comment). Keys name long options, with '_' or '-'.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// Appends "--key value" for every file entry whose option is absent from args, so that
// command line flags take precedence. "true" becomes a bare flag, "false" is skipped.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

}  // namespace hfm::cli

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config_file.hpp"
#include "hfm/errors.hpp"
#include "hfm/version.hpp"

int main(int argc, char** argv) {
    using namespace hfm::cli;
    CLI::App app{"Spin-wave free energy bounds for the quantum Heisenberg ferromagnet", "hfm"};
    app.set_version_flag("--version", "hfm " + std::string(hfm::version_string));
    app.require_subcommand(1);
    int code = exit_ok;
    register_commands(app, &code);
    register_verify(app, &code);
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    } catch (const hfm::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const hfm::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return code;
}

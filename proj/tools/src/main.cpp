#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stomod/cli/commands.hpp"
#include "stomod/cli/run_config.hpp"
#include "stomod/errors.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Temp file in the target directory, then rename, so a failed run leaves nothing behind.
void write_atomically(const fs::path& target, const std::string& content) {
    fs::path tmp = target;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw stomod::ConfigError(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        out.close();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw stomod::ConfigError(fmt::format("write failed for '{}'", tmp.string()));
        }
    }
    fs::rename(tmp, target);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modulated spin-torque oscillator sweeps"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    int jobs = 1;
    std::string op_labels;
    std::vector<std::string> overrides;
    bool dump_config = false;

    app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory; writes <command>.csv there (stdout otherwise)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--op-label", op_labels, "comma-separated operating point labels to keep");
    app.add_option("--set", overrides, "section.key=value override, repeatable");
    app.add_flag("--dump-config", dump_config, "print the resolved config and exit");

    for (auto c : {stomod::cli::Command::operating_point, stomod::cli::Command::psd_map,
                   stomod::cli::Command::asymmetry_map, stomod::cli::Command::bandwidth,
                   stomod::cli::Command::error_analysis}) {
        app.add_subcommand(std::string(stomod::cli::command_name(c)))->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const auto command = *stomod::cli::parse_command(app.get_subcommands().front()->get_name());

    try {
        stomod::cli::RunConfig config = config_path.empty() ? stomod::cli::RunConfig{}
                                                            : stomod::cli::load_config_file(config_path);
        for (const auto& o : overrides) stomod::cli::apply_override(config, o);
        config.format = format;
        if (!op_labels.empty()) stomod::cli::filter_operating_points(config, op_labels);

        if (dump_config) {
            stomod::cli::validate(config);
            std::cout << stomod::cli::canonical_text(config);
            return 0;
        }

        const std::string text = stomod::cli::render_command(command, config, {jobs});
        if (out_dir.empty()) {
            std::cout << text;
        } else {
            fs::create_directories(out_dir);
            write_atomically(fs::path(out_dir) / fmt::format("{}.csv", stomod::cli::command_name(command)), text);
        }
    } catch (const stomod::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const stomod::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

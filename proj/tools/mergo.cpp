#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mergo/app.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitExhausted = 4;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format;
};

int report_error(const std::string& status, const std::string& code, const std::string& message,
                 const std::optional<std::string>& node_id, const std::string& out_dir, int exit_code) {
    nlohmann::json err = {{"status", status}, {"code", code}, {"message", message}, {"exit_code", exit_code}};
    if (node_id) err["node_id"] = *node_id;
    std::cerr << err.dump() << '\n';
    if (!out_dir.empty()) {
        try {
            mergo::io::atomic_write(std::filesystem::path(out_dir) / "error.json", mergo::io::dump(err));
        } catch (const std::exception&) {
            // stderr already carries the record
        }
    }
    return exit_code;
}

int run(const std::string& command, const Options& opt) {
    std::string out_dir = opt.out_dir;
    try {
        auto cfg = mergo::config::load(opt.config_path);
        if (opt.seed) cfg.seed = *opt.seed;
        if (!opt.format.empty()) cfg.output.format = opt.format;
        if (out_dir.empty()) out_dir = cfg.output.dir;

        mergo::app::Artifacts artifacts;
        std::optional<std::string> exhausted;
        if (command == "evolve") artifacts = mergo::app::cmd_evolve(cfg);
        else if (command == "measure") artifacts = mergo::app::cmd_measure(cfg);
        else if (command == "tree") {
            auto t = mergo::app::cmd_tree(cfg);
            artifacts = std::move(t.artifacts);
            exhausted = t.exhausted;
        } else if (command == "lz") artifacts = mergo::app::cmd_lz(cfg);
        else if (command == "cost") artifacts = mergo::app::cmd_cost(cfg);
        else if (command == "validate") artifacts = mergo::app::cmd_validate(cfg);

        mergo::app::write_all(artifacts, out_dir);
        if (exhausted)
            return report_error("node_exhausted", "node_exhausted", "node " + *exhausted + " exhausted its retries",
                                exhausted, out_dir, kExitExhausted);
        for (const auto& [name, content] : artifacts.files)
            std::cout << (std::filesystem::path(out_dir) / name).string() << '\n';
        return kExitOk;
    } catch (const mergo::ConfigError& e) {
        return report_error("config_error", e.code(), e.what(), std::nullopt, out_dir, kExitConfig);
    } catch (const mergo::NodeExhausted& e) {
        return report_error("node_exhausted", e.code(), e.what(), e.node_id(), out_dir, kExitExhausted);
    } catch (const mergo::Error& e) {
        return report_error("runtime_error", e.code(), e.what(), std::nullopt, out_dir, kExitRuntime);
    } catch (const std::exception& e) {
        return report_error("runtime_error", "internal", e.what(), std::nullopt, out_dir, kExitRuntime);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Merge-and-measure simulation toolkit"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    const char* names[][2] = {{"evolve", "Propagate a state under the scheduled Hamiltonian"},
                              {"measure", "Weak measurement of the merge criterion"},
                              {"tree", "Execute a scattering tree"},
                              {"lz", "Landau-Zener success-probability sweep"},
                              {"cost", "Block-encoding cost table"},
                              {"validate", "Check a criterion for exchange symmetry"}};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n[0], n[1]);
        sub->add_option("--config", opt.config_path, "Run-config JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--out", opt.out_dir, "Output directory (overrides the config)");
        sub->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"json", "csv"}));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return report_error("config_error", "usage", e.what(), std::nullopt, "", kExitConfig);
    }
    auto* sub = app.get_subcommands().front();
    if (sub->get_option("--seed")->count() > 0) opt.seed = seed;
    return run(sub->get_name(), opt);
}

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fracflow/commands.hpp"
#include "fracflow/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional Yamabe flow laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    fracflow::CommandOptions opt;
    std::uint64_t seed = 0;

    using Command = std::function<int(const fracflow::RunConfig&, const fracflow::CommandOptions&,
                                      std::ostream&)>;
    const std::map<std::string, std::pair<std::string, Command>> commands{
        {"flow", {"integrate the flow and write diagnostics CSV plus summary", fracflow::cmd_flow}},
        {"spectrum", {"write multipliers or weighted eigenvalues", fracflow::cmd_spectrum}},
        {"verify", {"run the invariant battery", fracflow::cmd_verify}},
        {"bubble", {"report bubble constants and concentration of the initial field",
                    fracflow::cmd_bubble}},
        {"sweep", {"run the flow for each gamma in [sweep] gammas concurrently",
                   fracflow::cmd_sweep}},
    };
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "INI configuration file")->required();
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_flag("--quiet", opt.quiet, "suppress console output");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = fracflow::load_config(config_path);
        for (const auto& [name, entry] : commands) {
            auto* sub = app.get_subcommand(name);
            if (sub->parsed()) {
                if (sub->count("--seed") > 0) {
                    opt.seed = seed;
                }
                return entry.second(config, opt, std::cout);
            }
        }
    } catch (const fracflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    } catch (const fracflow::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 70;
    }
    return 1;
}

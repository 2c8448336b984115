#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diractime/config.hpp"
#include "diractime/errors.hpp"
#include "diractime/run.hpp"

namespace {

std::string read_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream file(path, std::ios::binary);
    if (!file) throw diractime::Error("io: cannot read config '" + path + "'");
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac wave-packet time-operator simulator and attoclock tunneling model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
    for (const char* name : {"evolve", "uncertainty", "tunneling", "selfcheck"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--out", out_path, "output CSV path (summary goes to <out>.summary)");
        sub->add_option("--set", sets, "override a config key, key=value (repeatable)")
            ->take_all();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? diractime::kExitOk : diractime::kExitValidation;
    }

    const std::string mode_text = app.get_subcommands().front()->get_name();
    diractime::RunConfig cfg;
    const int parsed = diractime::guarded(
        [&] {
            diractime::ConfigEntries overrides;
            for (const auto& s : sets) overrides.push_back(diractime::parse_override(s));
            if (!out_path.empty()) overrides.emplace_back("out", out_path);
            cfg = diractime::parse_config(read_config(config_path),
                                          diractime::parse_mode(mode_text), overrides);
            return diractime::kExitOk;
        },
        std::cerr);
    if (parsed != diractime::kExitOk) return parsed;
    return diractime::run(cfg, std::cout, std::cerr);
}

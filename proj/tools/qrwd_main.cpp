// qrwd: numerical workbench for quasiregular interpolation dynamics.
//
//   qrwd <command> [--config path] [--key value ...]
//
// Flags mirror the top-level config keys and override file values.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrwd/io.hpp"

int main(int argc, char** argv) {
    using nlohmann::json;

    CLI::App app{"quasiregular wandering-domain workbench"};
    app.allow_extras();  // --key value pairs are matched against the config registry
    std::string command, config_path;
    app.add_option("command", command,
                   "schedule | verify | dilatation | solve | shoot | render | report");
    app.add_option("--config", config_path, "JSON configuration file");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    json merged = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config file: " << config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        bool blank = true;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) {
            try {
                merged = json::parse(text);
            } catch (const json::exception& e) {
                std::cerr << "config parse error: " << e.what() << "\n";
                return 2;
            }
            if (!merged.is_object()) {
                std::cerr << "config parse error: top level must be an object\n";
                return 2;
            }
        }
    }

    // flags override file values: --key value (numbers, strings, or JSON)
    auto extras = app.remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || i + 1 >= extras.size()) {
            std::cerr << "usage error: expected --key value pairs, got '" << tok << "'\n";
            return 2;
        }
        std::string key = tok.substr(2);
        const std::string& val = extras[++i];
        try {
            merged[key] = json::parse(val);
        } catch (const json::exception&) {
            merged[key] = val;  // bare string
        }
    }
    if (!command.empty()) merged["command"] = command;

    qrwd::RunConfig cfg;
    try {
        cfg = qrwd::parse_config_json(merged.dump());
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    return qrwd::run(cfg);
}

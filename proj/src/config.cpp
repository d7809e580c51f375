#include <functional>
#include <map>

#include "json.hpp"
#include "qrwd/io.hpp"

namespace qrwd {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

struct Key {
    std::function<void(RunConfig&, const json&)> set;
    std::function<json(const RunConfig&)> get;
};

template <class T, class M>
Key field(M T::* member) {
    return Key{[member](RunConfig& c, const json& v) { c.*member = v.get<M>(); },
               [member](const RunConfig& c) { return json(c.*member); }};
}

const std::map<std::string, Key>& registry() {
    static const std::map<std::string, Key> reg = {
        {"command", field<RunConfig>(&RunConfig::command)},
        {"schedule_mode", field<RunConfig>(&RunConfig::schedule_mode)},
        {"toy_d", field<RunConfig>(&RunConfig::toy_d)},
        {"toy_heights", field<RunConfig>(&RunConfig::toy_heights)},
        {"gap_factor", field<RunConfig>(&RunConfig::gap_factor)},
        {"multi_q", field<RunConfig>(&RunConfig::multi_q)},
        {"anchor_level", field<RunConfig>(&RunConfig::anchor_level)},
        {"nmax", field<RunConfig>(&RunConfig::nmax)},
        {"variant", field<RunConfig>(&RunConfig::variant)},
        {"tol", field<RunConfig>(&RunConfig::tol)},
        {"max_terms", field<RunConfig>(&RunConfig::max_terms)},
        {"resolution", field<RunConfig>(&RunConfig::resolution)},
        {"mu_scale", field<RunConfig>(&RunConfig::mu_scale)},
        {"pad_factor", field<RunConfig>(&RunConfig::pad_factor)},
        {"shoot_tol", field<RunConfig>(&RunConfig::shoot_tol)},
        {"shoot_max_iter", field<RunConfig>(&RunConfig::shoot_max_iter)},
        {"delta1", field<RunConfig>(&RunConfig::delta1)},
        {"C", field<RunConfig>(&RunConfig::C)},
        {"K", field<RunConfig>(&RunConfig::K)},
        {"C5", field<RunConfig>(&RunConfig::C5)},
        {"piece", field<RunConfig>(&RunConfig::piece)},
        {"d", field<RunConfig>(&RunConfig::d)},
        {"grid_res", field<RunConfig>(&RunConfig::grid_res)},
        {"rho_w_re", field<RunConfig>(&RunConfig::rho_w_re)},
        {"rho_w_im", field<RunConfig>(&RunConfig::rho_w_im)},
        {"window_x", field<RunConfig>(&RunConfig::window_x)},
        {"window_y", field<RunConfig>(&RunConfig::window_y)},
        {"window_hw", field<RunConfig>(&RunConfig::window_hw)},
        {"window_hh", field<RunConfig>(&RunConfig::window_hh)},
        {"render_res", field<RunConfig>(&RunConfig::render_res)},
        {"max_iter", field<RunConfig>(&RunConfig::max_iter)},
        {"bailout", field<RunConfig>(&RunConfig::bailout)},
        {"map", field<RunConfig>(&RunConfig::map)},
        {"output", field<RunConfig>(&RunConfig::output)},
        {"report_path", field<RunConfig>(&RunConfig::report_path)},
        {"input", field<RunConfig>(&RunConfig::input)},
        {"rng_seed", field<RunConfig>(&RunConfig::rng_seed)},
        {"threads", field<RunConfig>(&RunConfig::threads)},
    };
    return reg;
}

void validate(const RunConfig& c) {
    auto bad = [](const std::string& k, const std::string& why) {
        throw DomainError("config." + k + ": " + why);
    };
    static const char* commands[] = {"schedule", "verify", "dilatation", "solve",
                                     "shoot", "render", "report"};
    bool found = false;
    for (const char* s : commands) found |= c.command == s;
    if (!found) bad("command", "unknown command '" + c.command + "'");
    if (c.schedule_mode != "toy" && c.schedule_mode != "true")
        bad("schedule_mode", "must be 'toy' or 'true'");
    if (c.variant != "even" && c.variant != "symmetric") bad("variant", "even|symmetric");
    if (c.nmax < 1 || c.nmax > 64) bad("nmax", "range [1, 64]");
    if (!(c.tol > 0.0)) bad("tol", "must be positive");
    if (c.max_terms < 1 || c.max_terms > 10000) bad("max_terms", "range [1, 10000]");
    if (c.resolution < 128 || c.resolution > 4096) bad("resolution", "range [128, 4096]");
    if (c.pad_factor < 2 || c.pad_factor > 8) bad("pad_factor", "range [2, 8]");
    if (!(c.delta1 > 0.0 && c.delta1 < 1.0)) bad("delta1", "range (0, 1)");
    if (!(c.K > 1.0)) bad("K", "must exceed 1");
    if (c.d < 1 || c.d > 64) bad("d", "range [1, 64]");
    if (c.grid_res < 64 || c.grid_res > 4096) bad("grid_res", "range [64, 4096]");
    if (c.render_res < 2 || c.render_res > 8192) bad("render_res", "range [2, 8192]");
    if (c.max_iter < 1) bad("max_iter", "must be positive");
    if (!(c.bailout > 10.0)) bad("bailout", "must exceed 10");
    if (c.threads < 0) bad("threads", "must be >= 0");
    for (int d : c.toy_d)
        if (d < 1 || d > 64) bad("toy_d", "entries in [1, 64]");
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
    RunConfig cfg;
    std::string body = text;
    // an empty document means all defaults
    bool blank = true;
    for (char ch : body)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (!blank) {
        json j = json::parse(body);  // throws json::parse_error on malformed input
        if (!j.is_object()) throw DomainError("config: top level must be an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            auto reg = registry().find(it.key());
            if (reg == registry().end())
                throw DomainError("config: unknown key '" + it.key() + "'");
            try {
                reg->second.set(cfg, it.value());
            } catch (const json::exception& e) {
                throw DomainError("config." + it.key() + ": type mismatch (" + e.what() + ")");
            }
        }
    }
    validate(cfg);
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    ordered j;
    for (const auto& [k, acc] : registry()) j[k] = acc.get(cfg);
    return j.dump();
}

}  // namespace qrwd

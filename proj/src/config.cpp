#include "fblv/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "fblv/error.hpp"
#include "fblv/io.hpp"

namespace fblv {

using json = nlohmann::ordered_json;

namespace {

std::string upper(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

template <class T>
T get(const json& group, const char* key)
{
    try {
        return group.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const RunConfig& c)
{
    json j;
    j["problem"] = {{"kind", std::string(to_string(c.kind))}};
    j["params"] = io::to_json(c.params);
    j["init"] = {{"preset", c.init.preset}, {"amplitude", c.init.amplitude}, {"table", c.init.table}};
    j["grid"] = io::to_json(c.grid);
    j["classify"] = {{"tol_vanish", c.classify.tol_vanish},
                     {"tol_stall_rel", c.classify.tol_stall_rel},
                     {"stop_on_certificate", c.stop_on_certificate}};
    j["output"] = {{"dir", c.output.dir}, {"series_stride", c.output.series_stride}, {"plots", c.output.plots}};
    j["threshold"] = {{"mu_lo", c.threshold.mu_lo},
                      {"mu_hi", c.threshold.mu_hi},
                      {"rel_tol", c.threshold.rel_tol},
                      {"max_retries", c.threshold.max_retries}};
    j["steady"] = {{"L", c.steady.L},
                   {"m", c.steady.m},
                   {"compare_run", c.steady.compare_run},
                   {"window_lo", c.steady.window_lo},
                   {"window_hi", c.steady.window_hi},
                   {"slack", c.steady.slack}};
    j["ode"] = {{"u0", c.ode.u0},
                {"v0", c.ode.v0},
                {"t_max", c.ode.t_max},
                {"dt", c.ode.dt},
                {"sample_stride", c.ode.sample_stride},
                {"iterations", c.ode.iterations}};
    j["barrier"] = {{"nt", c.barrier.nt},
                    {"nx", c.barrier.nx},
                    {"t_check", c.barrier.t_check},
                    {"deltas", c.barrier.deltas},
                    {"gammas", c.barrier.gammas},
                    {"k_factors", c.barrier.k_factors}};
    j["sweep"] = {{"mu", c.sweep.mu}, {"s0", c.sweep.s0}};
    return j;
}

RunConfig config_from_json(const json& input)
{
    if (!input.is_object()) throw PreconditionError("config must be a JSON object");
    json merged = to_json(RunConfig{});
    for (const auto& [group, values] : input.items()) {
        if (!merged.contains(group)) throw PreconditionError("unknown config group '" + group + "'");
        if (!values.is_object()) throw PreconditionError("config group '" + group + "' must be an object");
        for (const auto& [key, value] : values.items()) {
            if (!merged[group].contains(key)) {
                throw PreconditionError("unknown config key '" + group + "." + key + "'");
            }
            merged[group][key] = value;
        }
    }

    RunConfig c;
    c.kind = parse_problem_kind(get<std::string>(merged["problem"], "kind"));
    try {
        c.params = io::params_from_json(merged["params"]);
        c.grid = io::grid_from_json(merged["grid"]);
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("config params/grid: ") + e.what());
    }
    const auto& in = merged["init"];
    c.init = {get<std::string>(in, "preset"), get<double>(in, "amplitude"), get<std::string>(in, "table")};
    const auto& cl = merged["classify"];
    c.classify = {get<double>(cl, "tol_vanish"), get<double>(cl, "tol_stall_rel")};
    c.stop_on_certificate = get<bool>(cl, "stop_on_certificate");
    const auto& out = merged["output"];
    c.output = {get<std::string>(out, "dir"), get<int>(out, "series_stride"), get<bool>(out, "plots")};
    const auto& th = merged["threshold"];
    c.threshold = {get<double>(th, "mu_lo"), get<double>(th, "mu_hi"), get<double>(th, "rel_tol"),
                   get<int>(th, "max_retries")};
    const auto& st = merged["steady"];
    c.steady = {get<double>(st, "L"),         get<int>(st, "m"),           get<bool>(st, "compare_run"),
                get<double>(st, "window_lo"), get<double>(st, "window_hi"), get<double>(st, "slack")};
    const auto& od = merged["ode"];
    c.ode = {get<double>(od, "u0"), get<double>(od, "v0"),         get<double>(od, "t_max"),
             get<double>(od, "dt"), get<int>(od, "sample_stride"), get<int>(od, "iterations")};
    const auto& ba = merged["barrier"];
    c.barrier = {get<int>(ba, "nt"), get<int>(ba, "nx"), get<double>(ba, "t_check"),
                 get<std::vector<double>>(ba, "deltas"), get<std::vector<double>>(ba, "gammas"),
                 get<std::vector<double>>(ba, "k_factors")};
    const auto& sw = merged["sweep"];
    c.sweep = {get<std::vector<double>>(sw, "mu"), get<std::vector<double>>(sw, "s0")};
    return c;
}

std::string env_name(const std::string& group, const std::string& key)
{
    return std::string(kEnvPrefix) + upper(group) + "__" + upper(key);
}

std::optional<std::string> process_env(const std::string& name)
{
    const char* value = std::getenv(name.c_str());
    if (!value) return std::nullopt;
    return std::string(value);
}

json apply_env_overrides(json j, EnvLookup lookup)
{
    for (auto& [group, values] : j.items()) {
        for (auto& [key, value] : values.items()) {
            const auto text = lookup(env_name(group, key));
            if (!text) continue;
            // Numbers, booleans and arrays parse as JSON; anything else is a string.
            json parsed = json::parse(*text, nullptr, false);
            value = parsed.is_discarded() || value.is_string() ? json(*text) : parsed;
        }
    }
    return j;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path, EnvLookup lookup)
{
    json file = json::object();
    if (path) {
        file = json::parse(io::read_text(*path), nullptr, false);
        if (file.is_discarded()) throw PreconditionError("config " + path->string() + " is not valid JSON");
    }
    // Merge once to learn every key, then let the environment override.
    RunConfig merged = config_from_json(file);
    RunConfig config = config_from_json(apply_env_overrides(to_json(merged), lookup));
    validate(config);
    return config;
}

InitialData make_initial_data(const RunConfig& c)
{
    const auto& preset = c.init.preset;
    if (preset == "auto") return InitialData::preset_for(c.kind, c.params.s0, c.init.amplitude);
    switch (parse_init_preset(preset)) {
    case InitPreset::CosineBump: return InitialData::cosine_bump(c.params.s0, c.init.amplitude);
    case InitPreset::SineBump: return InitialData::sine_bump(c.params.s0, c.init.amplitude);
    case InitPreset::Table: break;
    }
    if (c.init.table.empty()) throw PreconditionError("init.table path required for preset 'table'");
    return io::read_initial_table(c.init.table);
}

void validate(const RunConfig& c)
{
    validate(c.params);
    validate(c.grid);
    if (c.params.s0 < 10.0 / c.grid.n_cells) {
        throw PreconditionError("s0 must be at least 10 grid spacings (s0 >= 10 / n_cells)");
    }
    const InitialData init = make_initial_data(c);
    if (std::abs(init.s0() - c.params.s0) > 1e-12 * c.params.s0) {
        throw PreconditionError("initial-data table ends at x = " + std::to_string(init.s0()) +
                                " but params.s0 = " + std::to_string(c.params.s0));
    }
    validate(init, c.kind);
    if (!(c.classify.tol_vanish > 0.0) || !(c.classify.tol_stall_rel >= 0.0)) {
        throw PreconditionError("classify tolerances must be positive");
    }
    if (c.output.series_stride < 1) throw PreconditionError("output.series_stride must be >= 1");
    if (!(c.threshold.mu_lo > 0.0) || !(c.threshold.mu_hi > c.threshold.mu_lo)) {
        throw PreconditionError("threshold needs 0 < mu_lo < mu_hi");
    }
    if (!(c.threshold.rel_tol > 0.0) || c.threshold.max_retries < 0) {
        throw PreconditionError("threshold needs rel_tol > 0 and max_retries >= 0");
    }
    if (c.steady.L != 0.0 || c.steady.m != 0) validate(HalfLineGrid{c.steady.L, c.steady.m});
    if (!(c.steady.slack >= 0.0)) throw PreconditionError("steady.slack must be nonnegative");
    if (!(c.steady.window_hi > c.steady.window_lo) || c.steady.window_lo < 0.0) {
        throw PreconditionError("steady window must satisfy 0 <= window_lo < window_hi");
    }
    if (!(c.ode.u0 > 0.0) || !(c.ode.v0 > 0.0) || !(c.ode.t_max >= 0.0) || !(c.ode.dt > 0.0) ||
        c.ode.sample_stride < 1 || c.ode.iterations < 1) {
        throw PreconditionError("ode group needs u0, v0, dt > 0, t_max >= 0, strides >= 1");
    }
    if (c.barrier.nt < 1 || c.barrier.nx < 1 || !(c.barrier.t_check > 0.0)) {
        throw PreconditionError("barrier grid needs nt, nx >= 1 and t_check > 0");
    }
    for (const auto* list : {&c.barrier.deltas, &c.barrier.gammas, &c.barrier.k_factors, &c.sweep.mu, &c.sweep.s0}) {
        for (double v : *list) {
            if (!(v > 0.0)) throw PreconditionError("lattice and sweep values must be positive");
        }
    }
    if (c.sweep.mu.empty() || c.sweep.s0.empty()) throw PreconditionError("sweep lists must be nonempty");
}

std::string trajectory_hash(const RunConfig& c)
{
    json j = to_json(c);
    j.erase("output");
    j["grid"].erase("t_max");
    return fnv1a(j.dump());
}

std::string config_hash(const RunConfig& c)
{
    json j = to_json(c);
    j.erase("output");
    return fnv1a(j.dump());
}

}  // namespace fblv

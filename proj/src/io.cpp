#include "fblv/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fblv/error.hpp"

namespace fblv::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    return out;
}

double parse_double(const std::string& text)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) {
        throw PreconditionError("cannot parse number '" + text + "'");
    }
    return value;
}

std::vector<std::vector<double>> parse_csv_table(const std::string& text, const std::string& header)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw PreconditionError("expected CSV header '" + header + "'");
    }
    const auto columns = split(header, ',').size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != columns) throw PreconditionError("malformed CSV row '" + line + "'");
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(parse_double(f));
        rows.push_back(std::move(row));
    }
    return rows;
}

json doubles(const std::vector<double>& values)
{
    json arr = json::array();
    for (double v : values) arr.push_back(v);
    return arr;
}

std::vector<double> doubles_from(const json& j)
{
    return j.get<std::vector<double>>();
}

}  // namespace

std::string format_double(double value)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write " + path.string());
    out << text;
    if (!out) throw PreconditionError("write failed for " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string series_csv(const RunRecord& record, int stride)
{
    std::string out = "t,s,s_prime,sup_u,sup_v\n";
    const auto n = record.series.size();
    for (std::size_t i = 0; i < n; ++i) {
        // Thinned output always keeps the last sample.
        if (stride > 1 && i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
        const auto& s = record.series[i];
        out += format_double(s.t) + ',' + format_double(s.s) + ',' + format_double(s.s_prime) +
               ',' + format_double(s.sup_u) + ',' + format_double(s.sup_v) + '\n';
    }
    return out;
}

std::string profile_csv(const Snapshot& snap)
{
    std::string out = "x,u,v\n";
    const std::size_t n = snap.U.size() - 1;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = snap.s * static_cast<double>(i) / static_cast<double>(n);
        out += format_double(x) + ',' + format_double(snap.U[i]) + ',' + format_double(snap.V[i]) + '\n';
    }
    return out;
}

void write_run(const fs::path& dir, const RunRecord& record, int series_stride)
{
    fs::create_directories(dir);
    write_text(dir / "series.csv", series_csv(record, series_stride));
    for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
        write_text(dir / ("profile_" + std::to_string(i) + ".csv"), profile_csv(record.snapshots[i]));
    }
    write_text(dir / "metadata.json", metadata_json(record).dump(2) + "\n");
}

std::vector<SeriesSample> parse_series_csv(const std::string& text)
{
    std::vector<SeriesSample> out;
    for (const auto& row : parse_csv_table(text, "t,s,s_prime,sup_u,sup_v")) {
        out.push_back({row[0], row[1], row[2], row[3], row[4]});
    }
    return out;
}

json to_json(const ModelParams& p)
{
    return json{{"k", p.k}, {"h", p.h}, {"r", p.r}, {"D", p.D}, {"mu", p.mu}, {"rho", p.rho}, {"s0", p.s0}};
}

ModelParams params_from_json(const json& j)
{
    ModelParams p;
    p.k = j.at("k").get<double>();
    p.h = j.at("h").get<double>();
    p.r = j.at("r").get<double>();
    p.D = j.at("D").get<double>();
    p.mu = j.at("mu").get<double>();
    p.rho = j.at("rho").get<double>();
    p.s0 = j.at("s0").get<double>();
    return p;
}

json to_json(const GridSpec& g)
{
    return json{{"n_cells", g.n_cells}, {"dt", g.dt}, {"t_max", g.t_max}, {"snapshot_stride", g.snapshot_stride}};
}

GridSpec grid_from_json(const json& j)
{
    GridSpec g;
    g.n_cells = j.at("n_cells").get<int>();
    g.dt = j.at("dt").get<double>();
    g.t_max = j.at("t_max").get<double>();
    g.snapshot_stride = j.at("snapshot_stride").get<int>();
    return g;
}

json metadata_json(const RunRecord& r)
{
    json j;
    j["code_version"] = FBLV_VERSION;
    j["kind"] = std::string(to_string(r.kind));
    j["params"] = to_json(r.params);
    j["grid"] = to_json(r.grid);
    j["samples"] = r.series.size();
    j["snapshots"] = r.snapshots.size();
    j["stopped_early"] = r.stopped_early;
    j["diagnostics"] = {{"bound_M", r.diagnostics.bound_M},
                        {"max_profile_ratio", r.diagnostics.max_profile_ratio},
                        {"max_speed_ratio", r.diagnostics.max_speed_ratio},
                        {"zero_speed_steps", r.diagnostics.zero_speed_steps}};
    if (r.failure) {
        j["failure"] = {{"step", r.failure->step}, {"t", r.failure->t}, {"message", r.failure->message}};
    } else {
        j["failure"] = nullptr;
    }
    return j;
}

json to_json(const Classification& c)
{
    json j;
    j["verdict"] = std::string(to_string(c.verdict));
    j["certificate_time"] = c.certificate_time ? json(*c.certificate_time) : json(nullptr);
    j["evidence"] = {{"final_s", c.evidence.final_s},
                     {"final_sup_u", c.evidence.final_sup_u},
                     {"final_sup_v", c.evidence.final_sup_v},
                     {"final_s_prime", c.evidence.final_s_prime}};
    return j;
}

json to_json(const ThresholdBracket& b)
{
    json hist = json::array();
    for (const auto& e : b.history) hist.push_back({{"mu", e.mu}, {"verdict", std::string(to_string(e.verdict))}});
    return json{{"mu_lo", b.mu_lo}, {"mu_hi", b.mu_hi}, {"width", b.width()},
                {"relative_width", b.mu_hi > 0.0 ? b.width() / b.mu_hi : 0.0}, {"history", hist}};
}

ThresholdBracket bracket_from_json(const json& j)
{
    ThresholdBracket b;
    b.mu_lo = j.at("mu_lo").get<double>();
    b.mu_hi = j.at("mu_hi").get<double>();
    for (const auto& e : j.at("history")) {
        b.history.push_back({e.at("mu").get<double>(), parse_verdict(e.at("verdict").get<std::string>())});
    }
    return b;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "key,mu,k,h,r,D,rho,s0,verdict,cert_time,final_s,final_sup_u,final_sup_v\n";
    for (const auto& row : rows) {
        const auto& p = row.params;
        out += row.key + ',' + format_double(p.mu) + ',' + format_double(p.k) + ',' +
               format_double(p.h) + ',' + format_double(p.r) + ',' + format_double(p.D) + ',' +
               format_double(p.rho) + ',' + format_double(p.s0) + ',';
        if (row.classification && row.error.empty()) {
            const auto& c = *row.classification;
            out += std::string(to_string(c.verdict)) + ',' +
                   (c.certificate_time ? format_double(*c.certificate_time) : std::string()) + ',' +
                   format_double(c.evidence.final_s) + ',' + format_double(c.evidence.final_sup_u) +
                   ',' + format_double(c.evidence.final_sup_v) + '\n';
        } else {
            out += "Error,,,,\n";
        }
    }
    return out;
}

std::string barriers_csv(const SteadyProfiles& b)
{
    std::string out = "x,u_bar,v_bar,u_low,v_low\n";
    for (int j = 0; j <= b.grid.m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        out += format_double(b.grid.x(j)) + ',' + format_double(b.u_bar[uj]) + ',' +
               format_double(b.v_bar[uj]) + ',' + format_double(b.u_low[uj]) + ',' +
               format_double(b.v_low[uj]) + '\n';
    }
    return out;
}

json to_json(const SandwichReport& r)
{
    return json{{"max_lower_violation_u", r.max_lower_violation_u},
                {"max_upper_violation_u", r.max_upper_violation_u},
                {"max_lower_violation_v", r.max_lower_violation_v},
                {"max_upper_violation_v", r.max_upper_violation_v},
                {"slack", r.slack},
                {"nodes_checked", r.nodes_checked},
                {"pass", r.pass}};
}

std::string trajectory_csv(const std::vector<OdeState>& traj)
{
    std::string out = "t,u,v\n";
    for (const auto& s : traj) {
        out += format_double(s.t) + ',' + format_double(s.u) + ',' + format_double(s.v) + '\n';
    }
    return out;
}

std::string iteration_csv(const IterationSeq& seq)
{
    std::string out = "j,u_bar_j,v_low_j\n";
    for (std::size_t i = 0; i < seq.u_bar.size(); ++i) {
        out += std::to_string(i + 1) + ',' + format_double(seq.u_bar[i]) + ',' +
               format_double(seq.v_low[i]) + '\n';
    }
    return out;
}

json certificate_json(const Mu0Result& r)
{
    const auto& m = r.report.margins;
    return json{{"delta", r.witness.delta},
                {"gamma", r.witness.gamma},
                {"K", r.witness.K},
                {"mu0", r.mu0},
                {"worst_margins", {{"pde_u", m.pde_u}, {"pde_v", m.pde_v}, {"initial", m.initial}, {"front", m.front}}},
                {"grid", {{"nt", r.report.grid.nt}, {"nx", r.report.grid.nx}, {"t_check", r.report.grid.t_check}}},
                {"front_bound", r.front_bound},
                {"lambda", r.lambda},
                {"tuples_tried", r.tuples_tried},
                {"kind", "sampled numerical certificate (not interval arithmetic)"}};
}

InitialData read_initial_table(const fs::path& path)
{
    std::vector<double> x, u, v;
    for (const auto& row : parse_csv_table(read_text(path), "x,u,v")) {
        x.push_back(row[0]);
        u.push_back(row[1]);
        v.push_back(row[2]);
    }
    return InitialData::table(std::move(x), std::move(u), std::move(v));
}

json to_json(const Checkpoint& c)
{
    json series = json::array();
    for (const auto& s : c.record.series) series.push_back({s.t, s.s, s.s_prime, s.sup_u, s.sup_v});
    json snaps = json::array();
    for (const auto& s : c.record.snapshots) {
        snaps.push_back({{"t", s.t}, {"s", s.s}, {"U", doubles(s.U)}, {"V", doubles(s.V)}});
    }
    const auto& d = c.record.diagnostics;
    return json{{"format", "fblv-checkpoint"},
                {"version", Checkpoint::kVersion},
                {"config_hash", c.config_hash},
                {"state", {{"t", c.state.t}, {"s", c.state.s}, {"s_prime", c.state.s_prime},
                           {"step", c.state.step}, {"U", doubles(c.state.U)}, {"V", doubles(c.state.V)}}},
                {"record", {{"params", to_json(c.record.params)},
                            {"kind", std::string(to_string(c.record.kind))},
                            {"grid", to_json(c.record.grid)},
                            {"diagnostics", {d.bound_M, d.max_profile_ratio, d.max_speed_ratio, d.zero_speed_steps}},
                            {"series", series},
                            {"snapshots", snaps}}}};
}

Checkpoint checkpoint_from_json(const json& j)
{
    if (j.value("format", "") != "fblv-checkpoint" || j.value("version", 0) != Checkpoint::kVersion) {
        throw PreconditionError("not a version-1 simulation checkpoint");
    }
    Checkpoint c;
    c.config_hash = j.at("config_hash").get<std::string>();
    const auto& st = j.at("state");
    c.state.t = st.at("t").get<double>();
    c.state.s = st.at("s").get<double>();
    c.state.s_prime = st.at("s_prime").get<double>();
    c.state.step = st.at("step").get<std::int64_t>();
    c.state.U = doubles_from(st.at("U"));
    c.state.V = doubles_from(st.at("V"));

    const auto& rec = j.at("record");
    c.record.params = params_from_json(rec.at("params"));
    c.record.kind = parse_problem_kind(rec.at("kind").get<std::string>());
    c.record.grid = grid_from_json(rec.at("grid"));
    const auto& d = rec.at("diagnostics");
    c.record.diagnostics = {d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>(),
                            d.at(3).get<std::int64_t>()};
    for (const auto& s : rec.at("series")) {
        c.record.series.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>(),
                                   s.at(3).get<double>(), s.at(4).get<double>()});
    }
    for (const auto& s : rec.at("snapshots")) {
        c.record.snapshots.push_back({s.at("t").get<double>(), s.at("s").get<double>(),
                                      doubles_from(s.at("U")), doubles_from(s.at("V"))});
    }
    return c;
}

json to_json(const ThresholdCheckpoint& c)
{
    return json{{"format", "fblv-threshold-checkpoint"},
                {"version", ThresholdCheckpoint::kVersion},
                {"config_hash", c.config_hash},
                {"bracket", to_json(c.bracket)}};
}

ThresholdCheckpoint threshold_checkpoint_from_json(const json& j)
{
    if (j.value("format", "") != "fblv-threshold-checkpoint" ||
        j.value("version", 0) != ThresholdCheckpoint::kVersion) {
        throw PreconditionError("not a version-1 threshold checkpoint");
    }
    return {j.at("config_hash").get<std::string>(), bracket_from_json(j.at("bracket"))};
}

}  // namespace fblv::io

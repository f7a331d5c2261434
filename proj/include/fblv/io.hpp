#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fblv/barriers.hpp"
#include "fblv/classifier.hpp"
#include "fblv/odelimits.hpp"
#include "fblv/solver.hpp"
#include "fblv/steady.hpp"

namespace fblv::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double.
std::string format_double(double value);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// Run records: series.csv, profile_<index>.csv, metadata sidecar.
std::string series_csv(const RunRecord& record, int stride = 1);
std::string profile_csv(const Snapshot& snapshot);
void write_run(const fs::path& dir, const RunRecord& record, int series_stride = 1);
std::vector<SeriesSample> parse_series_csv(const std::string& text);

json to_json(const ModelParams& params);
ModelParams params_from_json(const json& j);
json to_json(const GridSpec& grid);
GridSpec grid_from_json(const json& j);
json metadata_json(const RunRecord& record);

json to_json(const Classification& c);
json to_json(const ThresholdBracket& b);
ThresholdBracket bracket_from_json(const json& j);

std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string barriers_csv(const SteadyProfiles& barriers);
json to_json(const SandwichReport& report);

std::string trajectory_csv(const std::vector<OdeState>& trajectory);
std::string iteration_csv(const IterationSeq& seq);

json certificate_json(const Mu0Result& result);

/// Tabulated initial data: CSV with header x,u,v.
InitialData read_initial_table(const fs::path& path);

/// Resumable simulation state: the SimState, the record prefix and a hash
/// of the configuration that produced them.
struct Checkpoint {
    static constexpr int kVersion = 1;
    std::string config_hash;
    SimState state;
    RunRecord record;
};

json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const json& j);

/// Bisection progress for `threshold --resume`.
struct ThresholdCheckpoint {
    static constexpr int kVersion = 1;
    std::string config_hash;
    ThresholdBracket bracket;
};

json to_json(const ThresholdCheckpoint& checkpoint);
ThresholdCheckpoint threshold_checkpoint_from_json(const json& j);

}  // namespace fblv::io

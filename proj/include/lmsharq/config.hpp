#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmsharq/fec_model.hpp"
#include "lmsharq/mi_engine.hpp"
#include "lmsharq/sim_core.hpp"

namespace lmsharq {

struct CalibrationSettings {
    std::string wer_curve = "code/ccsds_turbo_8920_r1-6_wer.csv";
    MiTableSettings mi;
    std::string mi_table_cache; // empty: build the table in memory
    std::optional<double> mi_req_override;
};

/// Everything needed to set up runs: link/run parameters, the code and how
/// MI_req is calibrated.
struct Profile {
    SimConfig sim;
    CodeSpec code; // mi_req filled in by calibrate()
    CalibrationSettings calibration;
};

/// Built-in defaults, identical to data/profiles/paper-sectionV.ini.
Profile default_profile();

/// Applies INI overrides ([run], [link], [code], [calibration]) on top of
/// `profile`. Unknown sections or keys are configuration errors.
void apply_config(Profile& profile, std::istream& in);

/// `name_or_path` is either a file path or a profile name looked up as
/// <data_dir>/profiles/<name>.ini.
Profile load_profile(std::string_view name_or_path, const std::filesystem::path& data_dir);

/// "case1".."case3" or whitespace/comma separated probabilities.
DecodingProbTable parse_probs(std::string_view text);
/// "classical-equal" or whitespace/comma separated bit counts.
StaticBitTable parse_static_table(std::string_view text, std::int64_t mother_codeword_bits,
                                  int transmissions);

/// "clear" is built in; anything else is <data_dir>/environments/<name>.ini
/// or a direct path to a model file.
Environment load_environment(std::string_view name_or_path, const std::filesystem::path& data_dir);

/// Absolute paths pass through; relative ones are resolved against data_dir.
std::filesystem::path resolve_asset(std::string_view path, const std::filesystem::path& data_dir);

/// Builds (or loads the cached) MI table and fills profile.code.mi_req_per_bit.
MiTable calibrate(Profile& profile, const std::filesystem::path& data_dir);

/// "7:13:1" (inclusive range) or a comma list "7,10,13".
std::vector<double> parse_es_n0_list(std::string_view text);

} // namespace lmsharq

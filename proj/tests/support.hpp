#pragma once

#include "lmsharq/config.hpp"
#include "lmsharq/fec_model.hpp"
#include "lmsharq/mi_engine.hpp"

#include <filesystem>

namespace support {

inline std::filesystem::path data_dir()
{
    return LMSHARQ_TEST_DATA_DIR;
}

// Built once per test binary; the default table takes a fraction of a second.
inline const lmsharq::MiTable& mi_table()
{
    static const lmsharq::MiTable table = lmsharq::build_mi_table(lmsharq::MiTableSettings{});
    return table;
}

// Default code with MI_req calibrated from the shipped WER curve.
inline lmsharq::CodeSpec code()
{
    static const lmsharq::CodeSpec spec = [] {
        auto profile = lmsharq::default_profile();
        lmsharq::calibrate(profile, data_dir());
        return profile.code;
    }();
    return spec;
}

// Placeholder code used by the hand-computed examples (MI_req = 0.9).
inline lmsharq::CodeSpec placeholder_code()
{
    lmsharq::CodeSpec spec;
    spec.mi_req_per_bit = 0.9;
    return spec;
}

} // namespace support

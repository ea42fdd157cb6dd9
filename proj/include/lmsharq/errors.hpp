#pragma once

#include <stdexcept>
#include <string>

namespace lmsharq {

// All library failures derive from Error so callers can catch one type and
// still report the specific category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* category() const noexcept { return "error"; }
};

#define LMSHARQ_DEFINE_ERROR(Name, tag)                                  \
    class Name : public Error {                                          \
    public:                                                              \
        using Error::Error;                                              \
        const char* category() const noexcept override { return tag; }   \
    };

LMSHARQ_DEFINE_ERROR(ConfigError, "configuration error")
LMSHARQ_DEFINE_ERROR(DomainError, "domain error")
LMSHARQ_DEFINE_ERROR(RangeError, "range error")
LMSHARQ_DEFINE_ERROR(DataError, "data error")
LMSHARQ_DEFINE_ERROR(ModelError, "model error")
LMSHARQ_DEFINE_ERROR(TableError, "table error")
LMSHARQ_DEFINE_ERROR(CalibrationError, "calibration error")

#undef LMSHARQ_DEFINE_ERROR

} // namespace lmsharq

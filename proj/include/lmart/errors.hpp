#pragma once

#include <stdexcept>
#include <string>

namespace lmart {

enum class errc {
    empty_space,
    non_positive_weight,
    space_mismatch,
    negative_base,
    bad_exponent,
    invalid_partition,
    not_refining,
    bad_partition,
    interval_mismatch,
    not_integrable,
    depth_exceeded,
    not_conjugate,
    not_predictable,
    negative_process,
    not_adapted,
    unbounded_stop,
    filtration_mismatch,
    bad_lambda,
    mismatch,
    coefficient_unbounded,
    horizon_too_deep,
    config_invalid,
    parse_error,
    io_error,
    bad_argument,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::empty_space:          return "empty_space";
        case errc::non_positive_weight:  return "non_positive_weight";
        case errc::space_mismatch:       return "space_mismatch";
        case errc::negative_base:        return "negative_base";
        case errc::bad_exponent:         return "bad_exponent";
        case errc::invalid_partition:    return "invalid_partition";
        case errc::not_refining:         return "not_refining";
        case errc::bad_partition:        return "bad_partition";
        case errc::interval_mismatch:    return "interval_mismatch";
        case errc::not_integrable:       return "not_integrable";
        case errc::depth_exceeded:       return "depth_exceeded";
        case errc::not_conjugate:        return "not_conjugate";
        case errc::not_predictable:      return "not_predictable";
        case errc::negative_process:     return "negative_process";
        case errc::not_adapted:          return "not_adapted";
        case errc::unbounded_stop:       return "unbounded_stop";
        case errc::filtration_mismatch:  return "filtration_mismatch";
        case errc::bad_lambda:           return "bad_lambda";
        case errc::mismatch:             return "mismatch";
        case errc::coefficient_unbounded:return "coefficient_unbounded";
        case errc::horizon_too_deep:     return "horizon_too_deep";
        case errc::config_invalid:       return "config_invalid";
        case errc::parse_error:          return "parse_error";
        case errc::io_error:             return "io_error";
        case errc::bad_argument:         return "bad_argument";
    }
    return "unknown";
}

// index carries the offending position where one exists (e.g. the first
// non-refining filtration level), -1 otherwise.
struct Error : std::runtime_error {
    errc code;
    int index;

    Error(errc c, const std::string& what, int idx = -1)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code(c), index(idx) {}
};

[[noreturn]] inline void fail(errc c, const std::string& what, int idx = -1) {
    throw Error(c, what, idx);
}

}  // namespace lmart

#pragma once

#include <optional>
#include <utility>

#include "lmart/errors.hpp"
#include "lmart/riesz.hpp"

namespace testutil {

template <class F>
std::optional<lmart::errc> code_of(F&& fn) {
    try {
        std::forward<F>(fn)();
    } catch (const lmart::Error& e) {
        return e.code;
    }
    return std::nullopt;
}

inline lmart::Element elem(const lmart::SpacePtr& sp, std::vector<double> v) {
    return lmart::make_element(sp, std::move(v));
}

}  // namespace testutil

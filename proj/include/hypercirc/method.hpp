#pragma once

// Names for the five two-sample procedures this library can run side by
// side. The strings are the spelling used in result CSVs, config files, and
// on the command line.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hypercirc {

enum class Method { poincare_perm, poincare_boot, z, w, mww };

inline constexpr std::array<Method, 5> kAllMethods = {
    Method::poincare_perm, Method::poincare_boot, Method::z, Method::w, Method::mww};

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::poincare_perm: return "poincare_perm";
        case Method::poincare_boot: return "poincare_boot";
        case Method::z: return "z";
        case Method::w: return "w";
        case Method::mww: return "mww";
    }
    throw std::logic_error("method_name: unknown method");
}

inline Method method_from_name(std::string_view name) {
    for (const Method m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown method name: " + std::string(name));
}

} // namespace hypercirc

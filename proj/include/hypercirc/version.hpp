#pragma once

namespace hypercirc {

inline constexpr const char* kVersionString = "0.1.0";

} // namespace hypercirc

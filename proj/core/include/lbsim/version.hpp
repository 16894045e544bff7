#pragma once

namespace lbsim {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kRngName = "xoshiro256ss/v1";

} // namespace lbsim

//
// Project frad - Copyright 2026 the frad developers
// SPDX-License-Identifier: Apache-2.0
//
#ifndef FRAD_VERSION_HPP
#define FRAD_VERSION_HPP

namespace frad {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "frad";

}  // namespace frad

#endif

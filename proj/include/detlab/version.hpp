/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef DETLAB_VERSION_HPP
#define DETLAB_VERSION_HPP

namespace detlab {

inline constexpr const char* version = "0.1.0";

} // namespace detlab

#endif // DETLAB_VERSION_HPP

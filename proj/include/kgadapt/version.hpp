// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace kgadapt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kgadapt

// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <string>

namespace scenegen::log {

void warn(const std::string& msg);
void info(const std::string& msg);
// Number of warnings emitted so far in this process (test hook).
std::int64_t warn_count();
void set_quiet(bool q);

}  // namespace scenegen::log

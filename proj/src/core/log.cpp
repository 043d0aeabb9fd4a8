// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/core/log.hpp"

#include <iostream>

namespace scenegen::log {

namespace {
std::atomic<std::int64_t> g_warn_count{0};
std::atomic<bool> g_quiet{false};
}  // namespace

void warn(const std::string& msg) {
  ++g_warn_count;
  if (!g_quiet.load()) std::cerr << "[warn] " << msg << "\n";
}

void info(const std::string& msg) {
  if (!g_quiet.load()) std::cerr << "[info] " << msg << "\n";
}

std::int64_t warn_count() { return g_warn_count.load(); }

void set_quiet(bool q) { g_quiet.store(q); }

}  // namespace scenegen::log

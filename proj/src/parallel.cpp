// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#include "panowarp/parallel.hpp"

#include <atomic>

namespace panowarp {

namespace {
std::atomic<Exec> g_default{Exec::parallel};
}

Exec default_exec() { return g_default.load(std::memory_order_relaxed); }

void set_default_exec(Exec mode) { g_default.store(mode, std::memory_order_relaxed); }

} // namespace panowarp

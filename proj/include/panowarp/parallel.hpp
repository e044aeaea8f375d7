// Copyright Contributors to the panowarp Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace panowarp {

// Per-pixel kernels come in two flavors: a plain serial loop kept as the
// reference, and an OpenMP variant. Both produce bit-identical output, so
// the choice only affects speed. Reductions accumulate over fixed-size
// blocks combined in index order, which keeps results independent of the
// thread count.
enum class Exec {
    serial,
    parallel,
};

Exec default_exec();
void set_default_exec(Exec mode);

} // namespace panowarp

// SPDX-License-Identifier: Apache-2.0
// Own entry point: the distribution's benchmark_main archive is LTO bytecode
// tied to one compiler build.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();

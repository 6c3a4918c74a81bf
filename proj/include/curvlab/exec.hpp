#pragma once

namespace curvlab {

// Kernels with an OpenMP path also keep a serial reference path. Both must
// produce identical results: parallel loops only partition independent work
// and reductions happen afterwards in index order.
enum class Exec { serial, parallel };

// Number of threads the parallel path would use (1 when built without OpenMP).
int max_threads();

}  // namespace curvlab

#pragma once

namespace sqha {

/// Execution policy for the cell-parallel kernels.  `serial` is the reference
/// implementation used by the consistency tests; `openmp` distributes the cell
/// loop over threads.  Per-cell arithmetic is identical in both paths, and
/// reductions always combine per-cell partials in a fixed order, so results
/// are bit-identical regardless of policy or thread count.
enum class Exec { serial, openmp };

} // namespace sqha

#pragma once

namespace bsv {

/// Execution policy for the data-parallel kernels. The serial path is the
/// reference implementation; the parallel path must produce the same values.
enum class Exec { serial, parallel };

} // namespace bsv

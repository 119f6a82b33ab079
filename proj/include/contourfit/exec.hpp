#pragma once

namespace contourfit {

/// Selects between the OpenMP kernel and the single-threaded reference loop.
/// Both paths produce bit-identical results; the serial one exists for tests
/// and for the benchmark comparison.
enum class Exec { serial, parallel };

}  // namespace contourfit

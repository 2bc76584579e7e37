#pragma once

namespace hmass {

/// Selects between the OpenMP kernels and their serial reference versions.
enum class Exec { serial, parallel };

}  // namespace hmass

#pragma once

#include <span>

namespace cipher {

/// Adjusted Rand index between two labelings of the same items (Hubert &
/// Arabie). Labels are arbitrary integers; each distinct value is one class.
/// Returns 1 when both partitions are identical, including the degenerate
/// single-class case. Throws InvalidArgument on a length mismatch.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace cipher

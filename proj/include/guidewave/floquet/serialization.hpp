#pragma once

#include <optional>
#include <string>
#include <utility>

#include "guidewave/floquet/modes.hpp"

namespace guidewave::floquet {

// Document form: {side, N, M, J, k, cell, q_fingerprint, modes: [{alpha: [re, im], kind,
// lambda?, norm_sign, residual, coeffs: [[j, l, re, im], ...]}]}. Zero coefficients are omitted.
std::string basis_to_json(const ModeBasis& basis);
ModeBasis basis_from_json(const std::string& text);

// Cache key derived from (q fingerprint, k, cell, N, M, tolerances).
std::string mode_cache_key(std::uint64_t q_fingerprint, double k, CellSpec cell, int N, int M,
                           const Tolerances& tol);

// Stores both bases of one guide under `dir/modes_<key>.json`.
void save_mode_cache(const std::string& dir, const std::string& key, const ModeBasis& plus,
                     const ModeBasis& minus);
std::optional<std::pair<ModeBasis, ModeBasis>> load_mode_cache(const std::string& dir,
                                                               const std::string& key);

}  // namespace guidewave::floquet

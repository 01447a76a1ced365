#pragma once

#include "oddchern/models.hpp"

#include <json.hpp>

namespace oddchern {

// JSON model document:
// {
//   "dimension": d, "orbitals": 2N,
//   "hoppings": [{"displacement": [a1..ad], "matrix": [[re,im], ...]}, ...],
//   "chiral_frame": "standard" | [[re,im], ...],
//   "magnetic_form": [[th_11, ..], ..],            (optional, d x d antisymmetric)
//   "disorder": {"bond_coupling": l, "mass_coupling": l2, "mass_matrix": [[re,im],..]}
// }
// Matrices are row-major lists of [re, im] pairs. A non-standard chiral frame is
// rotated to diag(1_N, -1_N) at load time; the rotation is applied to every stored
// matrix.
HoppingModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const HoppingModel& model);

}  // namespace oddchern

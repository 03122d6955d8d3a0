#pragma once

// JSON encodings.
//   matrix:    { "dim": d, "re": [[...]], "im": [[...]] }   row-major
//   generator: { "hamiltonian": <matrix>, "jumps": [<matrix>, ...] }
// A superoperator serializes as a matrix with dim = d^2.

#include <nlohmann/json.hpp>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"

namespace qds {

nlohmann::json matrix_to_json(const Matrix& m);

/// Throws ValidationError on schema violations (missing keys, ragged rows,
/// dim mismatch, non-finite entries).
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json generator_to_json(const GklsGenerator& g);
GklsGenerator generator_from_json(const nlohmann::json& j);

}  // namespace qds

#include "qds/serialization.hpp"

#include <cmath>
#include <string>

#include "qds/errors.hpp"

namespace qds {
namespace {

RealMatrix read_part(const nlohmann::json& rows, Index dim, const char* key) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != dim) {
    throw ValidationError(std::string("matrix '") + key + "' must have dim rows");
  }
  RealMatrix out(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw ValidationError(std::string("matrix '") + key + "' row " + std::to_string(i) +
                            " must have dim entries");
    }
    for (Index k = 0; k < dim; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ValidationError("matrix entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ValidationError("matrix entries must be finite");
      out(i, k) = x;
    }
  }
  return out;
}

}  // namespace

nlohmann::json matrix_to_json(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("only square matrices serialize");
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
    throw ValidationError("matrix object needs 'dim' and 're'");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw ValidationError("matrix 'dim' must be a positive integer");
  }
  const auto dim = static_cast<Index>(j["dim"].get<long long>());
  const RealMatrix re = read_part(j["re"], dim, "re");
  RealMatrix im = RealMatrix::Zero(dim, dim);
  if (j.contains("im")) im = read_part(j["im"], dim, "im");
  Matrix out(dim, dim);
  out.real() = re;
  out.imag() = im;
  return out;
}

nlohmann::json generator_to_json(const GklsGenerator& g) {
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& v : g.jumps()) jumps.push_back(matrix_to_json(v));
  return {{"hamiltonian", matrix_to_json(g.hamiltonian())}, {"jumps", std::move(jumps)}};
}

GklsGenerator generator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("hamiltonian")) {
    throw ValidationError("generator needs a 'hamiltonian'");
  }
  Operator h = matrix_from_json(j["hamiltonian"]);
  std::vector<Operator> jumps;
  if (j.contains("jumps")) {
    if (!j["jumps"].is_array()) throw ValidationError("'jumps' must be an array");
    for (const auto& v : j["jumps"]) jumps.push_back(matrix_from_json(v));
  }
  return GklsGenerator(std::move(h), std::move(jumps));
}

}  // namespace qds

#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "qds/errors.hpp"
#include "qds/operators.hpp"

namespace qds::cli {

// Reads typed parameters, fills defaults and rejects keys nobody asked for.
class Params {
 public:
  Params(const nlohmann::json& given, std::string context)
      : given_(given), context_(std::move(context)), filled_(nlohmann::json::object()) {}

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    double v = fallback;
    if (given_.contains(key)) {
      if (!given_[key].is_number()) throw error(key, "must be a number");
      v = given_[key].get<double>();
      if (!std::isfinite(v)) throw error(key, "must be finite");
    }
    filled_[key] = v;
    return v;
  }

  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!given_.contains(key)) return std::nullopt;
    const double v = number(key, 0.0);
    return v;
  }

  Index integer(const std::string& key, Index fallback) {
    seen_.insert(key);
    Index v = fallback;
    if (given_.contains(key)) {
      if (!given_[key].is_number_integer()) throw error(key, "must be an integer");
      v = given_[key].get<Index>();
    }
    filled_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    std::string v = fallback;
    if (given_.contains(key)) {
      if (!given_[key].is_string()) throw error(key, "must be a string");
      v = given_[key].get<std::string>();
    }
    filled_[key] = v;
    return v;
  }

  /// Raw access for structured values; the caller stores the filled form.
  const nlohmann::json* raw(const std::string& key) {
    seen_.insert(key);
    return given_.contains(key) ? &given_[key] : nullptr;
  }

  void store(const std::string& key, nlohmann::json value) { filled_[key] = std::move(value); }

  nlohmann::json finish() {
    for (const auto& [key, value] : given_.items()) {
      if (!seen_.count(key)) {
        throw ValidationError(context_ + " has no parameter \"" + key + "\"");
      }
    }
    return filled_;
  }

  ValidationError error(const std::string& key, const std::string& what) const {
    return ValidationError("parameter \"" + key + "\" of " + context_ + " " + what);
  }

 private:
  const nlohmann::json& given_;
  std::string context_;
  nlohmann::json filled_;
  std::set<std::string> seen_;
};

}  // namespace qds::cli

#pragma once

// JSON forms of the core types:
//   Vec, DualVec        [x1, ..., xn]
//   Sym2Tensor, Matrix  [[row 1], ..., [row n]]
//   OscElement          {"m": matrix, "k": [..], "v": [..], "c": number}
//   GaussianMeasure     {"covariance": matrix}
//   Polynomial          {"terms": [{"exponents": [e1, ..., en], "coeff": c}]}
// Malformed input throws InvalidArgument.

#include <cstddef>
#include <nlohmann/json.hpp>

#include "rgflow/gaussian.hpp"
#include "rgflow/osc_group.hpp"
#include "rgflow/polynomial.hpp"
#include "rgflow/tensor.hpp"

namespace rgflow {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

/// Reads a polynomial; `dim` is required when the term list is empty.
Polynomial polynomial_from_json(const nlohmann::json& j, std::size_t dim = 0);

}  // namespace rgflow

namespace nlohmann {

template <>
struct adl_serializer<rgflow::Vec> {
  static rgflow::Vec from_json(const json& j) { return rgflow::Vec(rgflow::vector_from_json(j)); }
  static void to_json(json& j, const rgflow::Vec& v) { j = rgflow::vector_to_json(v.values()); }
};

template <>
struct adl_serializer<rgflow::DualVec> {
  static rgflow::DualVec from_json(const json& j) { return rgflow::DualVec(rgflow::vector_from_json(j)); }
  static void to_json(json& j, const rgflow::DualVec& v) { j = rgflow::vector_to_json(v.values()); }
};

template <>
struct adl_serializer<rgflow::Sym2Tensor> {
  static rgflow::Sym2Tensor from_json(const json& j) { return rgflow::Sym2Tensor(rgflow::matrix_from_json(j)); }
  static void to_json(json& j, const rgflow::Sym2Tensor& c) { j = rgflow::matrix_to_json(c.matrix()); }
};

template <>
struct adl_serializer<rgflow::GlElement> {
  static rgflow::GlElement from_json(const json& j) { return rgflow::GlElement(rgflow::matrix_from_json(j)); }
  static void to_json(json& j, const rgflow::GlElement& m) { j = rgflow::matrix_to_json(m.matrix()); }
};

template <>
struct adl_serializer<rgflow::OscElement> {
  static rgflow::OscElement from_json(const json& j);
  static void to_json(json& j, const rgflow::OscElement& g);
};

template <>
struct adl_serializer<rgflow::GaussianMeasure> {
  static rgflow::GaussianMeasure from_json(const json& j);
  static void to_json(json& j, const rgflow::GaussianMeasure& g);
};

template <>
struct adl_serializer<rgflow::Polynomial> {
  static rgflow::Polynomial from_json(const json& j) { return rgflow::polynomial_from_json(j); }
  static void to_json(json& j, const rgflow::Polynomial& p);
};

}  // namespace nlohmann

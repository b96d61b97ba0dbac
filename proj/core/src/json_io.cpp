#include "rgflow/json_io.hpp"

#include <string>

#include "rgflow/errors.hpp"

namespace rgflow {

using nlohmann::json;

namespace {

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidArgument(std::string(what) + " must be a number");
  return j.get<double>();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw InvalidArgument("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidArgument("matrix rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = number(row[static_cast<std::size_t>(k)], "matrix entry");
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("vector must be a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], "vector entry");
  return v;
}

Polynomial polynomial_from_json(const json& j, std::size_t dim) {
  const json& terms = field(j, "terms");
  if (!terms.is_array()) throw InvalidArgument("polynomial \"terms\" must be an array");
  Polynomial::Terms table;
  std::size_t n = dim;
  for (const json& t : terms) {
    const json& e = field(t, "exponents");
    if (!e.is_array() || e.empty()) throw InvalidArgument("polynomial exponents must be a non-empty array");
    Polynomial::Exponents exps;
    for (const json& x : e) {
      if (!x.is_number_integer() || x.get<long long>() < 0)
        throw InvalidArgument("polynomial exponents must be non-negative integers");
      exps.push_back(x.get<int>());
    }
    if (n == 0) n = exps.size();
    if (exps.size() != n)
      throw DimensionMismatch("polynomial term has " + std::to_string(exps.size()) + " exponents, expected " +
                              std::to_string(n));
    table[exps] += number(field(t, "coeff"), "polynomial coefficient");
  }
  if (n == 0) throw InvalidArgument("empty polynomial needs an explicit dimension");
  return Polynomial(n, table);
}

}  // namespace rgflow

namespace nlohmann {

rgflow::OscElement adl_serializer<rgflow::OscElement>::from_json(const json& j) {
  return rgflow::OscElement(rgflow::GlElement(rgflow::matrix_from_json(rgflow::field(j, "m"))),
                            rgflow::DualVec(rgflow::vector_from_json(rgflow::field(j, "k"))),
                            rgflow::Vec(rgflow::vector_from_json(rgflow::field(j, "v"))),
                            rgflow::number(rgflow::field(j, "c"), "c"));
}

void adl_serializer<rgflow::OscElement>::to_json(json& j, const rgflow::OscElement& g) {
  j = json{{"m", rgflow::matrix_to_json(g.m().matrix())},
           {"k", rgflow::vector_to_json(g.k().values())},
           {"v", rgflow::vector_to_json(g.v().values())},
           {"c", g.c()}};
}

rgflow::GaussianMeasure adl_serializer<rgflow::GaussianMeasure>::from_json(const json& j) {
  return rgflow::GaussianMeasure(rgflow::Sym2Tensor(rgflow::matrix_from_json(rgflow::field(j, "covariance"))));
}

void adl_serializer<rgflow::GaussianMeasure>::to_json(json& j, const rgflow::GaussianMeasure& g) {
  j = json{{"covariance", rgflow::matrix_to_json(g.covariance().matrix())}};
}

void adl_serializer<rgflow::Polynomial>::to_json(json& j, const rgflow::Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(json{{"exponents", e}, {"coeff", c}});
  j = json{{"terms", std::move(terms)}};
}

}  // namespace nlohmann

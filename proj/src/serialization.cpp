#include "bloch/serialization.hpp"

#include <cstdio>
#include <stdexcept>

namespace bloch {

namespace {

Complex entry_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument("expected a complex entry as [re, im]");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json entry_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json cmatrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(entry_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix cmatrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a matrix as a nested array of [re, im] entries");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw std::invalid_argument("matrix rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(j[r][c]);
  }
  return m;
}

Json cvector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(entry_to_json(v(i)));
  return out;
}

CVector cvector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a complex vector as an array of [re, im] entries");
  }
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = entry_from_json(j[i]);
  return v;
}

Json rvector_to_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RVector rvector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a real vector as a number array");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument("vector entries must be numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace bloch

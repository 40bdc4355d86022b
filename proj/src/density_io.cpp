#include "hmgh/density_io.hpp"

#include "hmgh/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace hmgh {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // snprintf honours LC_NUMERIC; normalise any comma decimal separator.
  for (char& c : s)
    if (c == ',') c = '.';
  return s;
}

DensityMatrix read_density_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed density-matrix JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dims") || !j.contains("re"))
    throw DomainError("density-matrix JSON needs \"dims\" and \"re\"");
  std::vector<int> dims;
  try {
    dims = j.at("dims").get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw DomainError("\"dims\" must be a list of integers");
  }
  SystemShape shape(dims);
  require_dense(shape);
  const auto total = static_cast<Eigen::Index>(shape.total());
  Matrix m = Matrix::Zero(total, total);
  auto fill = [&](const nlohmann::json& rows, bool imag) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != total)
      throw DomainError("density-matrix JSON has the wrong number of rows");
    for (Eigen::Index r = 0; r < total; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != total)
        throw DomainError("density-matrix JSON has a row of the wrong length");
      for (Eigen::Index c = 0; c < total; ++c) {
        const auto& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw DomainError("density-matrix JSON entries must be numbers");
        if (imag)
          m(r, c) += Complex(0.0, v.get<double>());
        else
          m(r, c) += Complex(v.get<double>(), 0.0);
      }
    }
  };
  fill(j.at("re"), false);
  if (j.contains("im")) fill(j.at("im"), true);
  return DensityMatrix(shape, std::move(m));
}

DensityMatrix load_density(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return read_density_json(in);
}

void write_density_json(std::ostream& out, const DensityMatrix& rho) {
  const Matrix& m = rho.matrix();
  out << "{\"dims\": [";
  const auto& dims = rho.shape().dims();
  for (std::size_t i = 0; i < dims.size(); ++i) out << (i ? ", " : "") << dims[i];
  out << "],\n";
  for (int part = 0; part < 2; ++part) {
    out << (part == 0 ? " \"re\": [" : " \"im\": [");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << (r ? ",\n  [" : "\n  [");
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double v = part == 0 ? m(r, c).real() : m(r, c).imag();
        out << (c ? ", " : "") << format_double(v);
      }
      out << ']';
    }
    out << (part == 0 ? "],\n" : "]}\n");
  }
}

void save_density(const std::string& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  write_density_json(out, rho);
}

}  // namespace hmgh

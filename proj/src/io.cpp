#include "nhqm/io.hpp"

#include <charconv>
#include <fstream>

namespace nhqm::io {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json cvec_list(const CVec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

json matrix_to_json(const CMat& a) {
  json j;
  j["dim"] = a.rows();
  json data = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) data.push_back(complex_to_json(a(i, k)));
  j["data"] = std::move(data);
  return j;
}

json vector_to_json(const CVec& v) {
  json j;
  j["dim"] = v.size();
  j["data"] = cvec_list(v);
  return j;
}

namespace {

Complex parse_complex(const json& e) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    fail(Errc::ParseError, "complex entries must be [re, im] number pairs");
  return {e[0].get<double>(), e[1].get<double>()};
}

}  // namespace

CMat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
    fail(Errc::ParseError, "matrix JSON must carry dim and data");
  long d = j["dim"].get<long>();
  if (d < 1) fail(Errc::ParseError, "matrix dim must be >= 1");
  const json& data = j["data"];
  if (!data.is_array() || static_cast<long>(data.size()) != d * d)
    fail(Errc::ParseError, "matrix data must hold dim*dim [re, im] pairs");
  CMat a(d, d);
  long idx = 0;
  for (long i = 0; i < d; ++i)
    for (long k = 0; k < d; ++k) a(i, k) = parse_complex(data[idx++]);
  if (!all_finite(a)) fail(Errc::ParseError, "matrix entries must be finite");
  return a;
}

CVec vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
    fail(Errc::ParseError, "vector JSON must carry dim and data");
  long d = j["dim"].get<long>();
  if (d < 1) fail(Errc::ParseError, "vector dim must be >= 1");
  const json& data = j["data"];
  if (!data.is_array() || static_cast<long>(data.size()) != d)
    fail(Errc::ParseError, "vector data must hold dim [re, im] pairs");
  CVec v(d);
  for (long i = 0; i < d; ++i) v(i) = parse_complex(data[i]);
  if (!all_finite(v)) fail(Errc::ParseError, "vector entries must be finite");
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Errc::ParseError, "invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

CMat read_matrix_file(const std::string& path) { return matrix_from_json(read_json_file(path)); }
CVec read_vector_file(const std::string& path) { return vector_from_json(read_json_file(path)); }

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(Errc::ParseError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace nhqm::io

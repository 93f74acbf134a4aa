#pragma once

#include <json.hpp>
#include <string>

#include "nhqm/linalg.hpp"

namespace nhqm::io {

using json = nlohmann::json;

/// Wire format: {"dim": d, "data": [[re, im], ...]}, row-major for matrices,
/// flat for vectors.  Reals round-trip bit-exactly.
json matrix_to_json(const CMat& a);
json vector_to_json(const CVec& v);
CMat matrix_from_json(const json& j);
CVec vector_from_json(const json& j);

json complex_to_json(Complex z);
json cvec_list(const CVec& v);  // [[re, im], ...] without the dim wrapper

CMat read_matrix_file(const std::string& path);
CVec read_vector_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double x);

}  // namespace nhqm::io

#include "sps/core/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sps/core/error.hpp"

namespace sps {
namespace {

using json = nlohmann::json;

Vector parse_vector(const json& node, std::string_view key) {
  if (!node.is_array()) {
    throw Error(ErrorCode::kParse, "\"" + std::string(key) + "\" must be an array of numbers");
  }
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw Error(ErrorCode::kParse, "\"" + std::string(key) + "\" contains a non-numeric entry");
    }
    v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& node) {
  if (!node.is_array() || node.empty()) {
    throw Error(ErrorCode::kParse, "\"A\" must be a non-empty array of rows");
  }
  const auto rows = node.size();
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector row = parse_vector(node[i], "A");
    if (static_cast<std::size_t>(row.size()) != rows) {
      throw Error(ErrorCode::kDimension,
                  "\"A\" must be square: row " + std::to_string(i) + " has " +
                      std::to_string(row.size()) + " entries, expected " + std::to_string(rows));
    }
    a.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return a;
}

TruncationSpec parse_truncation(const json& node) {
  if (!node.is_object() || node.size() != 1) {
    throw Error(ErrorCode::kParse,
                "\"truncation\" must be an object with exactly one of \"per_index\" or \"total_degree\"");
  }
  const auto entry = node.begin();
  const std::string key = entry.key();
  const json& value = entry.value();
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw Error(ErrorCode::kParse, "truncation cap must be a non-negative integer");
  }
  const int cap = value.get<int>();
  if (key == "per_index") return TruncationSpec::per_index(cap);
  if (key == "total_degree") return TruncationSpec::total_degree(cap);
  throw Error(ErrorCode::kParse, "unknown truncation mode \"" + key + "\"");
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

double reciprocal_condition(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double largest = s(0);
  if (!(largest > 0.0)) return 0.0;
  return s(s.size() - 1) / largest;
}

QuadraticSystem validate(QuadraticSystem system) {
  const auto m = system.A.rows();
  if (m == 0 || system.A.cols() != m) {
    throw Error(ErrorCode::kDimension, "A must be a non-empty square matrix");
  }
  if (system.b.size() != m) {
    throw Error(ErrorCode::kDimension, "b has length " + std::to_string(system.b.size()) +
                                           " but A is " + std::to_string(m) + "x" +
                                           std::to_string(m));
  }
  if (system.x0 && system.x0->size() != m) {
    throw Error(ErrorCode::kDimension, "x0 has length " + std::to_string(system.x0->size()) +
                                           " but A is " + std::to_string(m) + "x" +
                                           std::to_string(m));
  }
  if (!system.A.allFinite() || !system.b.allFinite() || (system.x0 && !system.x0->allFinite())) {
    throw Error(ErrorCode::kNonFinite, "system entries must be finite");
  }
  if (system.truncation && system.truncation->value < 0) {
    throw Error(ErrorCode::kInvalidArgument, "truncation cap must be non-negative");
  }
  const double rcond = reciprocal_condition(system.A);
  if (rcond < kMinReciprocalCondition) {
    std::ostringstream msg;
    msg << "A is singular or nearly singular (reciprocal condition " << rcond << " < "
        << kMinReciprocalCondition << "); the equilibrium requires an invertible A";
    throw Error(ErrorCode::kSingular, msg.str());
  }
  return system;
}

QuadraticSystem parse_system(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("malformed system document: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "system document must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    if (key != "A" && key != "b" && key != "x0" && key != "truncation") {
      throw Error(ErrorCode::kParse, "unknown key \"" + key + "\" in system document");
    }
  }
  if (!doc.contains("A")) throw Error(ErrorCode::kParse, "system document is missing \"A\"");
  if (!doc.contains("b")) throw Error(ErrorCode::kParse, "system document is missing \"b\"");

  QuadraticSystem system;
  system.A = parse_matrix(doc.at("A"));
  system.b = parse_vector(doc.at("b"), "b");
  if (doc.contains("x0")) system.x0 = parse_vector(doc.at("x0"), "x0");
  if (doc.contains("truncation")) system.truncation = parse_truncation(doc.at("truncation"));
  return validate(std::move(system));
}

QuadraticSystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open system file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

std::string emit_system(const QuadraticSystem& system) {
  json doc;
  json rows = json::array();
  for (Eigen::Index i = 0; i < system.A.rows(); ++i) rows.push_back(to_json(system.A.row(i).transpose()));
  doc["A"] = std::move(rows);
  doc["b"] = to_json(system.b);
  if (system.x0) doc["x0"] = to_json(*system.x0);
  if (system.truncation) {
    const bool per_index = system.truncation->mode == TruncationSpec::Mode::kPerIndex;
    doc["truncation"] = json{{per_index ? "per_index" : "total_degree", system.truncation->value}};
  }
  return doc.dump();
}

}  // namespace sps

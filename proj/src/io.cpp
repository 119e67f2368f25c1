#include "stochq/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace stochq::io {

namespace {

const Json& require(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ValidationError("expected an object", field);
  auto it = j.find(key);
  if (it == j.end()) {
    const std::string path = field.empty() ? key : field + "." + key;
    throw ValidationError("missing field '" + path + "'", path);
  }
  return *it;
}

std::string join(const std::string& field, const char* key) {
  return field.empty() ? std::string(key) : field + "." + key;
}

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError("expected a number", field);
  return j.get<double>();
}

std::vector<double> number_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("expected an array of numbers", field);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty array of rows", field);
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ValidationError("expected an array of rows", field);
  const std::size_t cols = j[0].size();
  RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const auto values = number_list(j[r], row_field);
    if (values.size() != cols) throw ValidationError("ragged matrix row", row_field);
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[c];
  }
  return m;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector real_vector_from_json(const Json& j, const std::string& field) {
  const auto values = number_list(j, field);
  return Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json complex_to_json(const ComplexMatrix& m) {
  return Json{{"re", to_json(RealMatrix(m.real()))}, {"im", to_json(RealMatrix(m.imag()))}};
}

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field) {
  const RealMatrix re = real_matrix_from_json(require(j, "re", field), join(field, "re"));
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = real_matrix_from_json(j["im"], join(field, "im"));
  if (im.rows() != re.rows() || im.cols() != re.cols()) {
    throw ValidationError("re and im differ in shape", join(field, "im"));
  }
  ComplexMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

Json complex_to_json(const ComplexVector& v) {
  return Json{{"re", to_json(RealVector(v.real()))}, {"im", to_json(RealVector(v.imag()))}};
}

ComplexVector complex_vector_from_json(const Json& j, const std::string& field) {
  const RealVector re = real_vector_from_json(require(j, "re", field), join(field, "re"));
  RealVector im = RealVector::Zero(re.size());
  if (j.contains("im")) im = real_vector_from_json(j["im"], join(field, "im"));
  if (im.size() != re.size()) throw ValidationError("re and im differ in length", join(field, "im"));
  ComplexVector v(re.size());
  v.real() = re;
  v.imag() = im;
  return v;
}

Json to_json(const sh::HermitianMatrix& h) {
  Json j = complex_to_json(h.matrix());
  j["n"] = h.dim();
  return j;
}

sh::HermitianMatrix hermitian_from_json(const Json& j, bool symmetrize) {
  const double n = number(require(j, "n", ""), "n");
  ComplexMatrix m = complex_matrix_from_json(j, "");
  if (n != static_cast<double>(m.rows()) || m.rows() != m.cols()) {
    throw ValidationError("matrix shape does not match n", "n");
  }
  return sh::HermitianMatrix(std::move(m), symmetrize);
}

Json to_json(const stochastic::IndivisibleProcess& p) {
  Json transitions = Json::array();
  for (const auto& [key, tm] : p.transitions()) {
    transitions.push_back(Json{{"t", key.first}, {"t0", key.second}, {"matrix", to_json(tm.matrix())}});
  }
  return Json{{"n", p.n()},
              {"targets", p.targets()},
              {"conditioning", p.conditioning()},
              {"transitions", transitions},
              {"initial", to_json(p.initial().probabilities())}};
}

stochastic::IndivisibleProcess process_from_json(const Json& j) {
  const double n_raw = number(require(j, "n", ""), "n");
  if (n_raw < 1 || n_raw != static_cast<double>(static_cast<long>(n_raw))) {
    throw ValidationError("n must be a positive integer", "n");
  }
  const auto n = static_cast<Eigen::Index>(n_raw);
  auto targets = number_list(require(j, "targets", ""), "targets");
  auto conditioning = number_list(require(j, "conditioning", ""), "conditioning");
  const Json& list = require(j, "transitions", "");
  if (!list.is_array()) throw ValidationError("expected an array", "transitions");
  std::vector<stochastic::TransitionMatrix> transitions;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string field = "transitions[" + std::to_string(k) + "]";
    const double t = number(require(list[k], "t", field), join(field, "t"));
    const double t0 = number(require(list[k], "t0", field), join(field, "t0"));
    RealMatrix m = real_matrix_from_json(require(list[k], "matrix", field), join(field, "matrix"));
    if (m.rows() != n || m.cols() != n) throw ValidationError("matrix is not n x n", join(field, "matrix"));
    auto checked = stochastic::validate(m, t, t0);
    if (auto* bad = std::get_if<stochastic::ViolationReport>(&checked)) {
      throw ValidationError("not column-stochastic: " + bad->summary(), join(field, "matrix"));
    }
    transitions.push_back(std::get<stochastic::TransitionMatrix>(std::move(checked)));
  }
  const RealVector initial = real_vector_from_json(require(j, "initial", ""), "initial");
  if (initial.size() != n) throw ValidationError("initial distribution must have n entries", "initial");
  return stochastic::IndivisibleProcess(n, std::move(targets), std::move(conditioning), std::move(transitions),
                                        stochastic::Distribution(initial));
}

Json to_json(const stochastic::DivisibilityVerdict& v) {
  Json j{{"status", stochastic::to_string(v.status)}, {"residual", v.residual}, {"pivots", v.pivots}};
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  j["certificate"] = v.certificate ? Json(*v.certificate) : Json(nullptr);
  return j;
}

stochastic::DivisibilityVerdict verdict_from_json(const Json& j) {
  using stochastic::Divisibility;
  stochastic::DivisibilityVerdict v;
  const Json& status = require(j, "status", "");
  if (!status.is_string()) throw ValidationError("expected a string", "status");
  const auto s = status.get<std::string>();
  if (s == "divisible") v.status = Divisibility::divisible;
  else if (s == "indivisible") v.status = Divisibility::indivisible;
  else if (s == "indeterminate") v.status = Divisibility::indeterminate;
  else throw ValidationError("unknown status '" + s + "'", "status");
  v.residual = number(require(j, "residual", ""), "residual");
  if (j.contains("pivots")) v.pivots = j["pivots"].get<long>();
  if (j.contains("witness") && !j["witness"].is_null()) v.witness = real_matrix_from_json(j["witness"], "witness");
  if (j.contains("certificate") && !j["certificate"].is_null()) v.certificate = j["certificate"].get<std::string>();
  return v;
}

Json to_json(const correspondence::KrausSet& k) {
  Json ops = Json::array();
  for (const auto& op : k.operators()) ops.push_back(complex_to_json(op));
  return ops;
}

correspondence::KrausSet kraus_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of complex matrices", "kraus");
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < j.size(); ++k) ops.push_back(complex_matrix_from_json(j[k], "kraus[" + std::to_string(k) + "]"));
  return correspondence::KrausSet(std::move(ops));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file " + path.string(), "input");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "input");
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const embed::Trajectory& traj) {
  out << "t,x,y\n";
  for (const auto& s : traj) out << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << '\n';
}

void write_csv(std::ostream& out, const sh::ShTrajectory& traj, Eigen::Index n) {
  out << 't';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",q_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",p_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    out << format_double(traj.t[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(traj.states[k].q(i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(traj.states[k].p(i));
    out << '\n';
  }
}

}  // namespace stochq::io

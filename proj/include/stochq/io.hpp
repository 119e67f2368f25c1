#pragma once

#include "stochq/correspondence.hpp"
#include "stochq/markov_embed.hpp"
#include "stochq/sh_sim.hpp"
#include "stochq/stochastic.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace stochq::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every parser throws ValidationError whose field() names the offending key
// (dotted path, e.g. "transitions[2].matrix").

Json to_json(const RealMatrix& m);  // row-major array of rows
RealMatrix real_matrix_from_json(const Json& j, const std::string& field);

Json to_json(const RealVector& v);
RealVector real_vector_from_json(const Json& j, const std::string& field);

// {"re": [[...]], "im": [[...]]}
Json complex_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field);

// {"re": [...], "im": [...]}
Json complex_to_json(const ComplexVector& v);
ComplexVector complex_vector_from_json(const Json& j, const std::string& field);

// {"n": N, "re": [[...]], "im": [[...]]}
Json to_json(const sh::HermitianMatrix& h);
sh::HermitianMatrix hermitian_from_json(const Json& j, bool symmetrize = false);

Json to_json(const stochastic::IndivisibleProcess& p);
stochastic::IndivisibleProcess process_from_json(const Json& j);

Json to_json(const stochastic::DivisibilityVerdict& v);
stochastic::DivisibilityVerdict verdict_from_json(const Json& j);

Json to_json(const correspondence::KrausSet& k);
correspondence::KrausSet kraus_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

// Throws std::runtime_error when the path cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v);  // %.17g

// Header `t,x,y`.
void write_csv(std::ostream& out, const embed::Trajectory& traj);

// Header `t,q_1,...,q_N,p_1,...,p_N`. N is taken from `n` so an empty
// trajectory still yields a complete header.
void write_csv(std::ostream& out, const sh::ShTrajectory& traj, Eigen::Index n);

}  // namespace stochq::io

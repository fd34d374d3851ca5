#include "schurlab/matrix_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& context) {
  if (!j.is_number())
    throw InvalidInputError(context + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw InvalidInputError(context + ": non-finite value");
  return x;
}

std::size_t dimension_at(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key) || !j[key].is_number_unsigned())
    throw InvalidInputError(context + ": missing or invalid \"" + key + "\"");
  return j[key].get<std::size_t>();
}

json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_object()) throw InvalidInputError(context + ": expected a matrix object");
  const std::size_t rows = dimension_at(j, "rows", context);
  const std::size_t cols = dimension_at(j, "cols", context);
  if (rows == 0 || cols == 0 || cols > 64 || rows > 64)
    throw InvalidInputError(context + ": dimensions must be between 1 and 64");
  if (!j.contains("data") || !j["data"].is_array() || j["data"].size() != rows * cols)
    throw InvalidInputError(context + ": \"data\" must hold rows*cols entries");
  ComplexMatrix m(rows, cols);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t jj = 0; jj < cols; ++jj, ++idx) {
      const json& e = j["data"][idx];
      if (!e.is_array() || e.size() != 2)
        throw InvalidInputError(context + ": each entry must be a [re, im] pair");
      m(i, jj) = cplx(number_at(e[0], context), number_at(e[1], context));
    }
  return m;
}

ComplexMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    // Covers parse errors and range failures alike, e.g. a literal 1e999
    // surfaces as an out_of_range from the number parser.
    throw InvalidInputError(path + ": " + e.what());
  }
  return matrix_from_json(j, path);
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw InvalidInputError("write to " + path + " failed");
}

nlohmann::json subspace_to_json(const Subspace& s) {
  return json{{"ambient", s.ambient()}, {"basis", matrix_to_json(s.basis())}};
}

Subspace subspace_from_json(const nlohmann::json& j, const std::string& context) {
  if (!j.is_object()) throw InvalidInputError(context + ": expected a subspace object");
  const std::size_t ambient = dimension_at(j, "ambient", context);
  if (!j.contains("basis")) throw InvalidInputError(context + ": missing \"basis\"");
  const json& b = j["basis"];
  // A trivial subspace is written with zero columns; matrix_from_json cannot
  // express that, so handle it before delegating.
  if (b.is_object() && b.contains("cols") && b["cols"].is_number_unsigned() &&
      b["cols"].get<std::size_t>() == 0)
    return Subspace::zero(ambient);
  return Subspace::from_orthonormal(ambient, matrix_from_json(b, context));
}

Subspace load_subspace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError(path + ": " + e.what());
  }
  return subspace_from_json(j, path);
}

nlohmann::json gk_profile_to_json(const GkProfile& p) {
  json eig = json::array();
  for (const cplx& z : p.eigenvalues) eig.push_back(complex_to_json(z));
  json blocks = json::array();
  for (const auto& sizes : p.block_sizes) blocks.push_back(sizes);
  return json{{"dim", p.dim},          {"eigenvalues", std::move(eig)},
              {"blocks", std::move(blocks)}, {"m", p.aggregate_m},
              {"k", p.dual_k},         {"uncertain", p.uncertain}};
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  json decades = json::array();
  for (const DecadeSummary& d : r.decades)
    decades.push_back(json{{"epsilon", d.epsilon},
                           {"trials", d.trials},
                           {"failures", d.failures},
                           {"max_ratio", d.max_ratio}});
  json records = json::array();
  for (const BackwardRecord& rec : r.records)
    records.push_back(json{{"epsilon", rec.trial.epsilon},
                           {"seed", rec.trial.seed},
                           {"norm_diff", rec.trial.norm_diff},
                           {"u_dist", rec.u_dist},
                           {"t_dist", rec.t_dist},
                           {"ratio", rec.holder_ratio}});
  return json{{"matrix_id", r.matrix_id},
              {"seed", r.seed},
              {"safety_threshold", r.safety_threshold},
              {"rank_tol", r.rank_tol},
              {"decades", std::move(decades)},
              {"records", std::move(records)}};
}

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "matrix_id,seed,epsilon,norm_diff,u_dist,t_dist,ratio\n";
  for (const BackwardRecord& rec : r.records) {
    out << r.matrix_id << ',' << rec.trial.seed << ',' << format_double(rec.trial.epsilon) << ','
        << format_double(rec.trial.norm_diff) << ',' << format_double(rec.u_dist) << ','
        << format_double(rec.t_dist) << ',' << format_double(rec.holder_ratio) << '\n';
  }
  return out.str();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace schurlab

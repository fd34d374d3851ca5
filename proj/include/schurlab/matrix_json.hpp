#pragma once

#include <string>

#include "json.hpp"
#include "schurlab/complex_matrix.hpp"
#include "schurlab/gaps.hpp"
#include "schurlab/jordan_gk.hpp"
#include "schurlab/stability.hpp"

namespace schurlab {

// On-disk matrix layout: {"rows": r, "cols": c, "data": [[re, im], ...]} with
// data in row-major order.  Loading rejects non-finite entries and wraps
// parse problems in InvalidInputError with the offending path in the message.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& context);

ComplexMatrix load_matrix(const std::string& path);
void save_text(const std::string& path, const std::string& text);

// Subspace layout: {"ambient": n, "basis": <matrix>}.
nlohmann::json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const nlohmann::json& j, const std::string& context);
Subspace load_subspace(const std::string& path);

nlohmann::json gk_profile_to_json(const GkProfile& p);

nlohmann::json report_to_json(const ExperimentReport& r);
// One row per successful trial: matrix_id, seed, epsilon, norm_diff, u_dist,
// t_dist, ratio.  Numbers are printed with %.17g so reruns are byte-stable.
std::string report_to_csv(const ExperimentReport& r);

// Shortest-exact decimal form used across all text output.
std::string format_double(double x);

}  // namespace schurlab

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schurlab/eigen.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/gaps.hpp"
#include "schurlab/jordan_gk.hpp"
#include "schurlab/lu.hpp"
#include "schurlab/matrix_json.hpp"
#include "schurlab/schur_decomp.hpp"
#include "schurlab/stability.hpp"
#include "schurlab/svd.hpp"

namespace {

using namespace schurlab;
using nlohmann::json;

bool log_enabled() {
  const char* v = std::getenv("SCHURLAB_LOG");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

void log_note(const std::string& msg) {
  if (log_enabled()) std::cerr << "schurlab: " << msg << "\n";
}

std::string stem_of(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    save_text(out_path, text);
    log_note("wrote " + out_path);
  }
}

std::string size_list(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

struct Options {
  std::string input, input2, out;
  std::string format;  // empty means the subcommand's natural default
  std::vector<double> decades;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  double rank_tol = 1e-8;
  double cluster_tol = 1e-6;
};

void require_json_format(const Options& opt) {
  if (!opt.format.empty() && opt.format != "json")
    throw InvalidInputError("csv output is only available for backward reports");
}

void run_schur(const Options& opt) {
  const ComplexMatrix a = load_matrix(opt.input);
  log_note("decomposing " + opt.input);
  const SchurForm s = schur_decompose(a, OrderingPolicy::FirstDiagonal);
  const double check = verify_schur(a, s);
  std::cout << "schur: n=" << a.rows() << " residual=" << format_double(s.residual)
            << " verify=" << format_double(check) << "\n";
  require_json_format(opt);
  json rep{{"input", opt.input},
           {"u", matrix_to_json(s.u)},
           {"t", matrix_to_json(s.t)},
           {"residual", s.residual},
           {"verify", check}};
  if (!opt.out.empty()) emit(opt.out, rep.dump(2) + "\n");
  if (check > 1e-8 * std::max(1.0, operator_norm(a)))
    throw NumericFailureError("schur: verification residual out of tolerance", check);
}

void run_gk(const Options& opt) {
  const ComplexMatrix a = load_matrix(opt.input);
  const GkProfile p = gk_profile(a, opt.cluster_tol, opt.rank_tol);
  if (p.uncertain)
    std::cerr << "schurlab: warning: structure decision was tolerance-sensitive\n";
  for (std::size_t i = 0; i < p.eigenvalues.size(); ++i)
    std::cout << "eigenvalue (" << format_double(p.eigenvalues[i].real()) << ", "
              << format_double(p.eigenvalues[i].imag()) << "): blocks "
              << size_list(p.block_sizes[i]) << "\n";
  std::cout << "m = " << size_list(p.aggregate_m) << "\n";
  std::cout << "k = " << size_list(p.dual_k) << "\n";
  require_json_format(opt);
  if (!opt.out.empty()) emit(opt.out, gk_profile_to_json(p).dump(2) + "\n");
}

void run_gap(const Options& opt) {
  const Subspace m = load_subspace(opt.input);
  const Subspace n = load_subspace(opt.input2);
  const double g = gap(m, n);
  const double s_mn = semigap(m, n);
  const double s_nm = semigap(n, m);
  std::cout << "gap=" << format_double(g) << " semigap_mn=" << format_double(s_mn)
            << " semigap_nm=" << format_double(s_nm) << "\n";
  require_json_format(opt);
  json rep{
      {"gap", g}, {"semigap_mn", s_mn}, {"semigap_nm", s_nm}, {"ambient", m.ambient()}};
  if (!opt.out.empty()) emit(opt.out, rep.dump(2) + "\n");
}

void run_backward(const Options& opt) {
  const ComplexMatrix a0 = load_matrix(opt.input);
  std::vector<double> decades = opt.decades;
  if (decades.empty())
    decades = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
  const ExperimentReport rep =
      measure_backward(a0, decades, opt.trials, opt.seed, stem_of(opt.input));
  for (const DecadeSummary& d : rep.decades)
    std::cout << "epsilon=" << format_double(d.epsilon) << " trials=" << d.trials
              << " failures=" << d.failures << " max_ratio=" << format_double(d.max_ratio)
              << "\n";
  const std::string fmt = opt.format.empty() ? "csv" : opt.format;
  const std::string text =
      fmt == "csv" ? report_to_csv(rep) : report_to_json(rep).dump(2) + "\n";
  if (!opt.out.empty())
    emit(opt.out, text);
  else if (fmt == "csv")
    std::cout << text;
}

void run_forward_demo(const Options& opt) {
  const ComplexMatrix p0 = load_matrix(opt.input);
  const ComplexMatrix j0 = load_matrix(opt.input2);
  const std::size_t n = j0.rows();

  // The bridge sits at the first superdiagonal zero: the seam between the
  // first block and its neighbor.
  std::size_t j_index = 0;
  for (std::size_t i = 0; i + 1 < n && j_index == 0; ++i)
    if (std::abs(j0(i, i + 1)) <= 1e-12) j_index = i + 1;
  if (j_index == 0)
    throw InvalidInputError("forward-demo: input form has a single block, nothing to bridge");
  log_note("bridging after position " + std::to_string(j_index));

  const ComplexMatrix a0 = forward_demo_perturb(p0, j0, j_index, 0.0);
  std::vector<cplx> u1 = p0.column(j_index);
  vec_scale(u1, cplx(1.0 / vec_norm(u1)));
  const SchurForm s0 = schur_with_leading_vector(a0, u1);
  const GkProfile base = gk_profile(a0, opt.cluster_tol, opt.rank_tol);

  std::vector<double> epsilons = opt.decades;
  if (epsilons.empty()) epsilons = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};

  json rows = json::array();
  for (double eps : epsilons) {
    const ComplexMatrix a = forward_demo_perturb(p0, j0, j_index, eps);
    bool advisory = false;
    const double bound = forward_gap_lower_bound(a0, s0.u, s0.t, a, 0, &advisory);
    // The eigenvalues of the merged block scatter like the m-th root of the
    // inserted entry, so the structure comparison needs a merge radius at
    // least that wide.
    const double entry = eps / (operator_norm(p0) * operator_norm(invert(p0)));
    const double tol_eps =
        std::max(opt.cluster_tol, 3.0 * std::pow(entry, 1.0 / static_cast<double>(n)));
    const GkProfile after = gk_profile(a, tol_eps, opt.rank_tol);
    const bool changed = after.aggregate_m != base.aggregate_m;
    std::cout << "epsilon=" << format_double(eps) << " gap_bound=" << format_double(bound)
              << " structure_changed=" << (changed ? "yes" : "no")
              << (advisory || after.uncertain ? " (uncertain)" : "") << "\n";
    rows.push_back(json{{"epsilon", eps},
                        {"gap_lower_bound", bound},
                        {"structure_changed", changed},
                        {"uncertain", advisory || after.uncertain},
                        {"gk_cluster_tol", tol_eps}});
  }
  require_json_format(opt);
  json rep{{"bridge_index", j_index},
           {"base_m", base.aggregate_m},
           {"rows", std::move(rows)}};
  if (!opt.out.empty()) emit(opt.out, rep.dump(2) + "\n");
}

void run_eig_holder(const Options& opt) {
  const ComplexMatrix a0 = load_matrix(opt.input);
  const ComplexMatrix a = load_matrix(opt.input2);
  const HolderRatioResult r = holder_ratio(a0, a, opt.cluster_tol);
  std::cout << "matched_dist=" << format_double(r.matched_dist)
            << " norm_diff=" << format_double(r.norm_diff)
            << " ratio_1n=" << format_double(r.ratio_1n) << " ratio_1=";
  if (r.lipschitz_applicable)
    std::cout << format_double(r.ratio_1) << "\n";
  else
    std::cout << "n/a\n";
  require_json_format(opt);
  json rep{{"matched_dist", r.matched_dist},
           {"norm_diff", r.norm_diff},
           {"ratio_1n", r.ratio_1n},
           {"lipschitz_applicable", r.lipschitz_applicable}};
  if (r.lipschitz_applicable) rep["ratio_1"] = r.ratio_1;
  if (!opt.out.empty()) emit(opt.out, rep.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur deflation and eigenstructure stability experiments"};
  app.require_subcommand(1);

  Options opt;
  int chosen = -1;

  struct SubSpec {
    const char* name;
    const char* help;
    bool needs_input2;
    bool has_experiment_flags;
  };
  const SubSpec specs[] = {
      {"schur", "Triangularize a matrix by first-column deflation", false, false},
      {"gk", "Jordan block structure and its dual sequence", false, false},
      {"gap", "Gap and semigaps between two stored subspaces", true, false},
      {"backward", "Random perturbation sweep of the deflation chain", false, true},
      {"forward-demo", "Bridge two blocks and watch the leading Schur vector", true, true},
      {"eig-holder", "Eigenvalue movement ratios between two matrices", true, false},
  };
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(specs[i].name, specs[i].help);
    sub->add_option("--input", opt.input, "Input JSON file")->required();
    if (specs[i].needs_input2)
      sub->add_option("--input2", opt.input2, "Second input JSON file")->required();
    sub->add_option("--out", opt.out, "Write the report here instead of stdout");
    sub->add_option("--format", opt.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--rank-tol", opt.rank_tol, "Relative rank tolerance");
    sub->add_option("--cluster-tol", opt.cluster_tol, "Eigenvalue cluster radius");
    if (specs[i].has_experiment_flags) {
      sub->add_option("--decades", opt.decades, "Perturbation sizes, largest first")
          ->delimiter(',');
      sub->add_option("--trials", opt.trials, "Trials per decade");
      sub->add_option("--seed", opt.seed, "Base seed for the trial streams");
    }
    sub->callback([&chosen, i]() { chosen = i; });
  }

  try {
    app.parse(argc, argv);
    switch (chosen) {
      case 0: run_schur(opt); break;
      case 1: run_gk(opt); break;
      case 2: run_gap(opt); break;
      case 3: run_backward(opt); break;
      case 4: run_forward_demo(opt); break;
      case 5: run_eig_holder(opt); break;
      default: throw InvalidInputError("no subcommand selected");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << "schurlab: " << e.what() << "\n";
    return 1;
  } catch (const InvalidInputError& e) {
    std::cerr << "schurlab: " << e.what() << "\n";
    return 1;
  } catch (const PairingFailureError& e) {
    std::cerr << "schurlab: " << e.what() << "\n";
    return 2;
  } catch (const NumericFailureError& e) {
    std::cerr << "schurlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "schurlab: internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

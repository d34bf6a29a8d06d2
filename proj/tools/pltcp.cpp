// Command line front end: spec synthesis plus the three experiment drivers.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pltcp/experiments.hpp>

namespace {

using namespace pltcp;

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return 1;
  }
  f << text;
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_synth(const std::string& spec_path, bool verify, const std::string& out_path) {
  const CPLikeSpec spec = spec_from_json(parse_json_text(read_file(spec_path)));
  const CpSynthesis synth = synthesize_cp(spec);
  const BlockEncoding& enc = synth.encoding;

  std::string header = "alpha,a,b,s,eps";
  std::string row = format_float(enc.alpha) + "," + std::to_string(synth.term_ancillas) + "," +
                    std::to_string(synth.lcu_ancillas) + "," + std::to_string(enc.s) + "," +
                    format_float(enc.eps);
  if (verify) {
    if (enc.s <= max_dense_qubits() && enc.width() <= max_dense_qubits()) {
      const Index dim = Index(1) << enc.s;
      CMatrix target = CMatrix::Zero(dim, dim);
      for (std::size_t j = 0; j < spec.terms.size(); ++j)
        target += spec.coefficients[j] * kron_all(spec.terms[j]);
      header += ",error";
      row += "," + format_float(encoding_error(enc, target));
    } else {
      std::cerr << "note: verification skipped, " << enc.width()
                << " qubits exceed the dense guard (PLTCP_MAX_QUBITS overrides)\n";
    }
  }
  return emit(header + "\n" + row + "\n", out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-encoding synthesis for sums of Kronecker products"};
  app.require_subcommand(1);

  std::string spec_path, out_path;
  bool verify = false;
  auto* synth = app.add_subcommand("synth", "synthesize an encoding from a spec JSON file");
  synth->add_option("spec", spec_path, "spec JSON file")->required();
  synth->add_flag("--verify", verify, "measure the dense encoding error when small enough");
  synth->add_option("--out", out_path, "write to a file instead of stdout");

  int s_min = 2, s_max = 10, trials = 1000;
  double h = 2.0, eta = 0.01;
  std::uint64_t seed = 0;
  std::string scenario = "both";
  auto* noise = app.add_subcommand("tfim-noise", "coherent-noise study of the transverse-field chain");
  noise->set_help_flag("--help", "print help");  // frees -h for the field strength
  noise->add_option("--s-min", s_min, "smallest chain length")->check(CLI::Range(2, 10));
  noise->add_option("--s-max", s_max, "largest chain length")->check(CLI::Range(2, 10));
  noise->add_option("--h", h, "transverse field strength");
  noise->add_option("--eta", eta, "per-gate spectral perturbation");
  noise->add_option("--trials", trials, "trials per chain length");
  noise->add_option("--seed", seed, "master seed");
  noise->add_option("--scenario", scenario, "which gate classes get perturbed")
      ->check(CLI::IsMember({"pauli", "prep", "both"}));
  noise->add_option("--out", out_path, "write to a file instead of stdout");

  int xs = 3, restarts = 20;
  std::vector<int> ranks;
  double stop_below = 0.0;
  auto* xyzcp = app.add_subcommand("xyz-cp", "CP rank sweep of the spin-1 chain");
  xyzcp->add_option("--s", xs, "chain length")->check(CLI::Range(3, 6))->required();
  xyzcp->add_option("--ranks", ranks, "ranks to sweep")->delimiter(',')->required();
  xyzcp->add_option("--restarts", restarts, "random restarts per rank");
  xyzcp->add_option("--seed", seed, "master seed");
  auto* stop_opt =
      xyzcp->add_option("--stop-below", stop_below, "end a rank's restarts once this error is hit");
  xyzcp->add_option("--out", out_path, "write to a file instead of stdout");

  std::vector<int> s_values;
  std::string regime = "exact";
  double eps = 0.0;
  auto* cost = app.add_subcommand("cost", "CNOT cost report per chain length");
  cost->add_option("--s", s_values, "chain lengths")->delimiter(',')->required();
  cost->add_option("--regime", regime, "cost regime")->check(CLI::IsMember({"exact", "approx"}));
  auto* eps_opt = cost->add_option("--eps", eps, "target accuracy for the approximate regime");
  cost->add_option("--out", out_path, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(spec_path, verify, out_path);
    if (noise->parsed()) {
      NoiseScenario sc;
      sc.perturb_paulis = scenario != "prep";
      sc.perturb_state_prep = scenario != "pauli";
      sc.eta = eta;
      sc.trials = trials;
      sc.seed = seed;
      return emit(tfim_noise_csv(run_tfim_noise(s_min, s_max, h, sc)), out_path);
    }
    if (xyzcp->parsed()) {
      std::optional<double> stop;
      if (stop_opt->count() > 0) stop = stop_below;
      const std::map<int, std::vector<int>> per_s = {{xs, ranks}};
      return emit(xyz_cp_csv(run_xyz_cp(xs, xs, per_s, restarts, seed, stop)), out_path);
    }
    if (cost->parsed()) {
      std::optional<double> e;
      if (eps_opt->count() > 0) e = eps;
      return emit(cost_report_csv(s_values, regime, e), out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

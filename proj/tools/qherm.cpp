#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qherm/cli_commands.hpp"
#include "qherm/hilbert_basis.hpp"
#include "qherm/quantum_hermite.hpp"
#include "qherm/weyl_transform.hpp"

using namespace qherm;

int main(int argc, char** argv) {
  CLI::App app{"Quantum Hermite functions: families, verification suites, operator transforms"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> lambda;
  std::optional<int> n, N, M, quad, quad4;
  std::optional<unsigned> seed;
  std::optional<std::string> out;
  auto common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "JSON config file; flags take precedence");
    sc->add_option("--lambda", lambda, "lambda > 0");
    sc->add_option("--n", n, "dimension (1)");
    sc->add_option("--N", N, "truncation per coordinate");
    sc->add_option("--M", M, "family order, M <= N/4");
    sc->add_option("--quad", quad, "Gauss-Hermite order, >= 2N");
    sc->add_option("--quad4", quad4, "per-axis order of 4-D rules");
    sc->add_option("--seed", seed, "seed for randomized checks");
    sc->add_option("--out", out, "output directory");
  };

  auto* basis = app.add_subcommand("basis", "build the ladder family and export it");
  common(basis);

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run an invariant suite and write a JSON report");
  common(verify);
  verify->add_option("--suite", suite, "ladder|weyl|bargmann|fourier|radial|symbolic|all");

  std::string input;
  auto* fourier = app.add_subcommand("fourier", "apply the operator Fourier transform (series route)");
  common(fourier);
  fourier->add_option("--input", input, "operator JSON")->required();

  int k_max = -1;
  auto* radial = app.add_subcommand("radial", "radiality verdict and Laguerre decomposition");
  common(radial);
  radial->add_option("--input", input, "operator JSON")->required();
  radial->add_option("--k-max", k_max, "largest k (default N/4)");

  std::string points;
  auto* beval = app.add_subcommand("bargmann-eval", "evaluate the Gauss-Bargmann transform to CSV");
  common(beval);
  beval->add_option("--input", input, "operator JSON")->required();
  beval->add_option("--points", points, "JSON array of [re_z, im_z, re_w, im_w]");

  std::string mu;
  auto* symbolic = app.add_subcommand("symbolic", "print p_mu in normal order");
  common(symbolic);
  symbolic->add_option("--mu", mu, "multi-index, e.g. 1,0")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_config_file(config_path);
    if (lambda) cfg.lambda = *lambda;
    if (n) cfg.n = *n;
    if (N) cfg.N = *N;
    if (M) cfg.M = *M;
    if (quad) cfg.quad_order = *quad;
    if (quad4) cfg.quad4_order = *quad4;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    cfg.validate();

    if (basis->parsed()) return cli::cmd_basis(cfg, std::cout);
    if (verify->parsed()) return cli::cmd_verify(cfg, suite, std::cout);
    if (fourier->parsed()) return cli::cmd_fourier(cfg, input, std::cout);
    if (radial->parsed()) return cli::cmd_radial(cfg, input, k_max, std::cout);
    if (beval->parsed()) return cli::cmd_bargmann_eval(cfg, input, points, std::cout);
    if (symbolic->parsed()) return cli::cmd_symbolic(cfg, mu, std::cout);
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const ContextError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const HeadroomError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return cli::kUsage;
}

// Command line front end: solve <config>, oracle <config>, nfinfo <law>.

#include <oifem/driver.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"Nonlinear elliptic interface problems by convex energy minimisation"};
  app.require_subcommand(1);

  std::string solve_config;
  auto *solve = app.add_subcommand("solve", "Solve the configured problem and write field, diagnostics and report");
  solve->add_option("config", solve_config, "Configuration file")->required();

  std::string oracle_config;
  auto *oracle = app.add_subcommand("oracle", "Print the exact slab solution");
  oracle->add_option("config", oracle_config, "Configuration file (slab mesh)")->required();

  std::string law;
  auto *nfinfo = app.add_subcommand("nfinfo", "Delta_2 classification of a law's N-functions");
  nfinfo->add_option("law", law, "sinh-bv or power:<p>")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return oifem::run_solve(oifem::parse_config_file(solve_config), std::cout, std::cerr);
    if (*oracle)
      return oifem::run_oracle(oifem::parse_config_file(oracle_config), std::cout, std::cerr);
    if (*nfinfo)
      return oifem::run_nfinfo(law, std::cout, std::cerr);
  } catch (const oifem::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return oifem::exit_input_error;
  }
  return oifem::exit_input_error;
}

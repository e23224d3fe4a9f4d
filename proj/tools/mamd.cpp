#include "mamd/cli.hpp"

int main(int argc, char** argv) { return mamd::cli::run_cli(argc, argv); }

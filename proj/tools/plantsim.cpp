#include "plantsim/cli.hpp"

int main(int argc, char** argv) { return plantsim::cli::run(argc, argv); }

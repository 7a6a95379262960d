#include "cli.hpp"

int main(int argc, char** argv) { return bspn::cli::run_main(argc, argv); }

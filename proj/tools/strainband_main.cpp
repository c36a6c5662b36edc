#include "strainband/cli.hpp"

int main(int argc, char** argv) { return strainband::cli_run(argc, argv); }

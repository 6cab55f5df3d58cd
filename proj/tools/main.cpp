#include "cli.hpp"

int main(int argc, char** argv) { return hetrain::cli::cli_main(argc, argv); }

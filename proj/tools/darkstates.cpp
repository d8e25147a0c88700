#include "darkstates/io/cli.hpp"

int main(int argc, char** argv) { return darkstates::io::run_cli(argc, argv); }

#include "mpcc/cli.hpp"

int main(int argc, char** argv) { return mpcc::run_cli(argc, argv); }

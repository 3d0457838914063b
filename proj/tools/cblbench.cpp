#include "cbl/cli.hpp"

int main(int argc, char** argv) { return cbl::cli_main(argc, argv); }

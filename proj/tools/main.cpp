#include "eftqdi/cli.hpp"

int main(int argc, char** argv) { return eftqdi::cli_main(argc, argv); }

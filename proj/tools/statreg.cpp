#include "statreg/cli.hpp"

int main(int argc, char** argv) { return statreg::cli_main(argc, argv); }

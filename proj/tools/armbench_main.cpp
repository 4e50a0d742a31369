#include "armbench/cli.hpp"

int main(int argc, char** argv) { return arm::cli_main(argc, argv); }

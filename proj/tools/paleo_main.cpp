#include "paleo/cli.hpp"

int main(int argc, char** argv) { return paleo::run_cli(argc, argv); }

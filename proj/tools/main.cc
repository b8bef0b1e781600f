#include "transitepi/cli.h"

int main(int argc, char** argv) { return transitepi::run_cli(argc, argv); }

#include "expsel/cli.hpp"

int main(int argc, char** argv) { return expsel::cli_main(argc, argv); }

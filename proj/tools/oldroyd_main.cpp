#include "oldroyd/cli.hpp"

int main(int argc, char** argv) { return oldroyd::run_cli(argc, argv); }

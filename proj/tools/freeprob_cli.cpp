#include "freeprob/cli.hpp"

int main(int argc, char** argv) { return freeprob::run_cli(argc, argv); }

#include "banrep/cli.hpp"

int main(int argc, char** argv) { return banrep::cli::main(argc, argv); }

#include "plap/cli.hpp"

int main(int argc, char** argv) { return plap::cli::main(argc, argv); }

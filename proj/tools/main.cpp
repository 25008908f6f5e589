#include "maxstable/cli.hpp"

int main(int argc, char** argv) { return maxstable::cli::main(argc, argv); }

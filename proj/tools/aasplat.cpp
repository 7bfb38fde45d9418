#include "aasplat/cli/commands.hpp"

int main(int argc, char** argv) { return aasplat::cli::main(argc, argv); }

#include "iit/cli.hpp"

int main(int argc, char** argv) { return iit::cli::main_entry(argc, argv); }

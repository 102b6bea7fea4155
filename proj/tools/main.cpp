#include "casvm/cli.hpp"

int main(int argc, char** argv) { return casvm::cli::run(argc, argv); }

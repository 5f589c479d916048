#include "hmer/cli/cli.hpp"

int main(int argc, char** argv) { return hmer::cli::run(argc, argv); }

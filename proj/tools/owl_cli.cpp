#include "owl/cli.hpp"

int main(int argc, char** argv) { return owl::cli::run(argc, argv); }

#include "udiscrim/cli.hpp"

int main(int argc, char** argv) { return udiscrim::cli::run(argc, argv); }

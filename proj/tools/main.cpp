#include "cli.hpp"

int main(int argc, char** argv) { return refcon::cli::run(argc, argv); }

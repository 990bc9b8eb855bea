#include "midstar/cli.hpp"

int main(int argc, char** argv) { return midstar::cli::run(argc, argv); }

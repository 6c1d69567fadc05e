#include "cli.hpp"

int main(int argc, char **argv) { return k3pt::cli::run(argc, argv); }

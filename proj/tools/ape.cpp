#include "ape/cli.hpp"

int main(int argc, char **argv) { return ape::run(argc, argv); }

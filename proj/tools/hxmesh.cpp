#include <iostream>

#include "hxmesh/cli.hpp"

int main(int argc, char** argv) { return hxmesh::run_cli(argc, argv, std::cout, std::cerr); }

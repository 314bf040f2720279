#include <iostream>

#include "richpart/cli.hpp"

int main(int argc, char** argv) { return richpart::cli_dispatch(argc, argv, std::cout, std::cerr); }

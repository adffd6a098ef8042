#include <iostream>

#include "acrelax/cli.hpp"

int main(int argc, char** argv) { return acrelax::cli_main(argc, argv, std::cout, std::cerr); }

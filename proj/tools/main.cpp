#include "wsob/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wsob::cli_main(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "t4f/gateway.hpp"

int main(int argc, char** argv) { return t4f::gateway::cli_dispatch(argc, argv, std::cout, std::cerr); }

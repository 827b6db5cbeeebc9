#include <iostream>

#include "popaware/cli.hpp"

int main(int argc, char** argv) {
    return popaware::cli_main(argc, argv, std::cout, std::cerr);
}

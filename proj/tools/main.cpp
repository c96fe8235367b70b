#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    return modrec::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}

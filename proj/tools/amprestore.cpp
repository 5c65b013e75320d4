#include <iostream>

#include "amprestore/cli.hpp"

int main(int argc, char** argv) {
    return amprestore::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

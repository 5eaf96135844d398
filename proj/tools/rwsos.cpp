#include <iostream>

#include "rwsos/cli.hpp"

int main(int argc, char** argv) {
    return rwsos::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}

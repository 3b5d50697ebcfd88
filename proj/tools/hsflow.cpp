#include <iostream>

#include "hsflow/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return hsflow::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}

#include <iostream>

#include "relaxmm/app.hpp"

int main(int argc, char** argv) {
    return relaxmm::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

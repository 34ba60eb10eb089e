#include <vector>

#include "eplan/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return eplan::cli::run(args);
}

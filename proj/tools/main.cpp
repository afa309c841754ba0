#include <vector>

#include "eloreview/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return eloreview::run_cli(args);
}

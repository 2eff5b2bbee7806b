#include <string>
#include <vector>

#include "stclear/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stclear::cli::cli_main(std::move(args));
}

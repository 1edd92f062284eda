#include <vector>

#include "austere/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return austere::cli::run(args);
}

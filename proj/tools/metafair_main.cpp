#include <string>
#include <vector>

#include "metafair/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return metafair::cli::dispatch(args);
}

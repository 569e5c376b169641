#include "lngca/cli.hpp"

int main(int argc, char** argv) {
    return lngca::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

#include <string>
#include <vector>

#include "vortexpacket/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vortex::dispatch(args);
}

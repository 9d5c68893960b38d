#include <iostream>

#include "edgarctl/app.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return edgarctl::run(args, std::cout, std::cerr);
}

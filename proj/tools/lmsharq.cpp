#include "lmsharq/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return lmsharq::cli_main(argc, argv, std::cout, std::cerr);
}

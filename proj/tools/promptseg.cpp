#include "promptseg/cli.hpp"
#include "promptseg/log.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    promptseg::init_logging();
    return promptseg::cli::run(argc, argv, std::cout, std::cerr);
}

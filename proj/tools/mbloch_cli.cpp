#include <iostream>

#include "mbloch/commands.hpp"

int main(int argc, char** argv) { return mbloch::cli::run(argc, argv, std::cout, std::cerr); }

#include "qelim/cli.hpp"

int main(int argc, char** argv) { return qelim::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "casimir/job.hpp"

int main(int argc, char** argv) { return casimir::cli::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "sturmcert/cli.hpp"

int main(int argc, char** argv) { return sturmcert::cli::run(argc, argv, std::cout, std::cerr); }

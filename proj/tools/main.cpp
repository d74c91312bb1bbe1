#include "cli.hpp"

int main(int argc, char** argv) { return qmcforge::cli::run(argc, argv); }

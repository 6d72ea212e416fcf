#include "qecgrad/cli.hpp"

int main(int argc, char** argv) { return qecgrad::cli::main(argc, argv); }

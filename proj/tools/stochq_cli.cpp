#include "stochq/cli.hpp"

int main(int argc, char** argv) { return stochq::cli::main_entry(argc, argv); }

#include "cadict/cli.hpp"

int main(int argc, char** argv) { return cadict::cli::run(argc, argv); }

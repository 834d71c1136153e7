#include "gbart/cli.hpp"

int main(int argc, char** argv) { return gbart::cli_main(argc, argv); }

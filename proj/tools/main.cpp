#include "cli.hpp"

int main(int argc, char** argv) { return oee::cli_main(argc, argv); }

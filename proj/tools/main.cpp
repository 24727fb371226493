#include "vsq/cli.hpp"

int main(int argc, char** argv) { return vsq::cli_main(argc, argv); }

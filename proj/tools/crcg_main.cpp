#include "crcg/cli.hpp"

int main(int argc, char** argv) { return crcg::run_cli(argc, argv); }

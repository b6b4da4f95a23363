#include "nam/cli.hpp"

int main(int argc, char** argv) { return nam::run_cli(argc, argv); }

#include "kerr/cli.hpp"

int main(int argc, char** argv) { return kerr::run_cli(argc, argv); }

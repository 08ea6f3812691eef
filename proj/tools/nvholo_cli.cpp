#include "nvholo/cli.hpp"

int main(int argc, char** argv) { return nvholo::run_cli(argc, argv); }

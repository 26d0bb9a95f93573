#include "smootherlab/cli.hpp"

int main(int argc, char** argv) { return smootherlab::run_cli(argc, argv); }

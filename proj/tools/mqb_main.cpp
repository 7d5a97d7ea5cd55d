#include "mqb/cli.hpp"

int main(int argc, char** argv) { return mqb::run_main(argc, argv); }

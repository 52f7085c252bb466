#include "metatrail/cli.hpp"

int main(int argc, char** argv) { return metatrail::cli::run(argc, argv); }

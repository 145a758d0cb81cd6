#include "multicopy/cli.hpp"

int main(int argc, char** argv) { return multicopy::cli::run_cli(argc, argv); }

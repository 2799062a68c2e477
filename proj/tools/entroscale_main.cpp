#include "entroscale/commands.hpp"

int main(int argc, char** argv) { return entroscale::cli::run_cli(argc, argv); }

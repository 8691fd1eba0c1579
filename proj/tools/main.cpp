#include "winreg/cli.hpp"

int main(int argc, char** argv) { return winreg::run_cli(argc, argv); }

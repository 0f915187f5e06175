#include "curveforge/commands.hpp"

int main(int argc, char** argv) { return curveforge::run_cli(argc, argv); }

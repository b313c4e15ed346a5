#include "attackqa/cli/app.hpp"

int main(int argc, char** argv) { return attackqa::cli::forge_main(argc, argv); }

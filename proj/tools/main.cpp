#include "tumorfa/cli.hpp"

int main(int argc, char** argv) { return tumorfa::cli_main(argc, argv); }

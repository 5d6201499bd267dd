#include "star/cli.hpp"

int main(int argc, char** argv) { return star::cli_main(argc, argv); }

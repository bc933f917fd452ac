#include "tomedia/cli.hpp"

int main(int argc, char** argv) { return tomedia::run(argc, argv); }

#include "flatlink/cli.hpp"

int main(int argc, char** argv) { return flatlink::cli::run(argc, argv); }

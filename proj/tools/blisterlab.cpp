#include <blisterlab/cli.hpp>

int main(int argc, char** argv) { return blisterlab::cli::run(argc, argv); }

#include "qgspectra/cli.hpp"

int main(int argc, char** argv) { return qgs::cli::dispatch(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return journeylab::cli::run(argc, argv); }

#include "rgflow/cli/commands.hpp"

int main(int argc, char** argv) { return rgflow::cli::run(argc, argv); }

#include "saferust/cli.hpp"

int main(int argc, char** argv) { return saferust::cli::dispatch(argc, argv); }

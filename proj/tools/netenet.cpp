#include "cli_app.hpp"

int main(int argc, char** argv) { return netenet::cli::run(argc, argv); }

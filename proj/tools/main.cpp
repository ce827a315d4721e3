#include "ulsq/harness.hpp"

int main(int argc, char** argv) { return ulsq::cli_main(argc, argv); }

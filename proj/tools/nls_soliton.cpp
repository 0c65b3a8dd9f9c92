#include "nls/driver.hpp"

int main(int argc, char** argv) { return nls::cli_main(argc, argv); }

// SPDX-License-Identifier: Apache-2.0
#include "dsa/cli.hpp"

int main(int argc, char** argv) { return dsa::run_cli(argc, argv); }

#include "aesn/aesn.hpp"
#include <CLI11.hpp>
int main(int, char**) { return 0; }

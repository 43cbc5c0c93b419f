#include <catch2/catch_amalgamated.hpp>

#include "aesn/aesn.hpp"

#include <doctest.h>

TEST_SUITE("copulas") {}

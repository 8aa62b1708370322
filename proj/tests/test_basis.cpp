#include <doctest.h>

TEST_SUITE("basis") {}

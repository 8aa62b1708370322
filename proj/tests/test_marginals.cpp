#include <doctest.h>

TEST_SUITE("marginals") {}

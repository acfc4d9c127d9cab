#pragma once

#include <doctest.h>

#include "speckle/error.hpp"

#define CHECK_THROWS_KIND(expr, k)                         \
    do {                                                   \
        bool thrown_ = false;                              \
        try {                                              \
            (void)(expr);                                  \
        } catch (const speckle::Error& e_) {               \
            thrown_ = true;                                \
            CHECK(e_.kind() == (k));                       \
        }                                                  \
        CHECK_MESSAGE(thrown_, "expected " #k " from " #expr); \
    } while (0)

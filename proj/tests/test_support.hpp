#pragma once

#include <doctest.h>

#include "common.hpp"

// Runs f, which must throw npam::Error, and hands back the code for
// assertions on the error taxonomy.
template <typename F>
npam::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const npam::Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return npam::ErrorCode::internal;
}

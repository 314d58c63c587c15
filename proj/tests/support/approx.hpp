#pragma once

#include <doctest.h>

// Purely relative comparison: doctest's default Approx adds epsilon * 1 of
// absolute slack, which hides relative errors in values well below one.
inline doctest::Approx rel(double v) { return doctest::Approx(v).scale(0.0); }

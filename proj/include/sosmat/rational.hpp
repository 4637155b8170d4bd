#pragma once

#include <boost/multiprecision/gmp.hpp>

namespace sosmat {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace sosmat

#pragma once

#include <gmpxx.h>

#include <string>

namespace cobord {

using Integer = mpz_class;

inline std::string to_string(const Integer& v) { return v.get_str(); }

}  // namespace cobord

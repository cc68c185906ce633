#ifndef PARABOLIC_PARABOLIC_HPP
#define PARABOLIC_PARABOLIC_HPP

#include "anisotropy.hpp"
#include "conditions.hpp"
#include "core.hpp"
#include "field.hpp"
#include "harness.hpp"
#include "kernel.hpp"
#include "operators.hpp"
#include "spaces.hpp"

#endif // PARABOLIC_PARABOLIC_HPP

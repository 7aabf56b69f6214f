#ifndef CUTSTACK_CUTSTACK_HPP
#define CUTSTACK_CUTSTACK_HPP

#include "alternation.hpp"
#include "coding.hpp"
#include "exact.hpp"
#include "experiment.hpp"
#include "fbar.hpp"
#include "good_sets.hpp"
#include "orbit.hpp"
#include "partner.hpp"
#include "rng.hpp"
#include "spec.hpp"
#include "spec_io.hpp"
#include "tower.hpp"
#include "windows.hpp"

#endif  // CUTSTACK_CUTSTACK_HPP

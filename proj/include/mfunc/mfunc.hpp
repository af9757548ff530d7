#pragma once

#include "mfunc/approximant.hpp"
#include "mfunc/characters.hpp"
#include "mfunc/density.hpp"
#include "mfunc/empirical.hpp"
#include "mfunc/errors.hpp"
#include "mfunc/experiments.hpp"
#include "mfunc/fft.hpp"
#include "mfunc/io.hpp"
#include "mfunc/lfunction.hpp"
#include "mfunc/localfactor.hpp"
#include "mfunc/parallel.hpp"
#include "mfunc/primes.hpp"
#include "mfunc/rect.hpp"
#include "mfunc/rng.hpp"
#include "mfunc/special.hpp"
#include "mfunc/tau.hpp"
#include "mfunc/testfn.hpp"

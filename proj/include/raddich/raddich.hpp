#pragma once

#include "raddich/bvp.hpp"
#include "raddich/config.hpp"
#include "raddich/dichotomy.hpp"
#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/io.hpp"
#include "raddich/lemma_lab.hpp"
#include "raddich/parallel.hpp"
#include "raddich/quadrature.hpp"
#include "raddich/random.hpp"
#include "raddich/riccati.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

#pragma once

#include "oplab/error.hpp"
#include "oplab/linalg.hpp"
#include "oplab/means.hpp"
#include "oplab/random.hpp"
#include "oplab/posmaps.hpp"
#include "oplab/certify.hpp"
#include "oplab/spectral.hpp"
#include "oplab/io.hpp"
#include "oplab/ensemble.hpp"
#include "oplab/suite.hpp"

#pragma once

#include "nlisim/config.hpp"
#include "nlisim/constants.hpp"
#include "nlisim/csv.hpp"
#include "nlisim/dispersion.hpp"
#include "nlisim/engine.hpp"
#include "nlisim/errors.hpp"
#include "nlisim/peaks.hpp"
#include "nlisim/runner.hpp"
#include "nlisim/schmidt.hpp"
#include "nlisim/sellmeier.hpp"
#include "nlisim/spectral.hpp"

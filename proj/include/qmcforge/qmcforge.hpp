#pragma once

#include "qmcforge/errors.hpp"
#include "qmcforge/zeta.hpp"
#include "qmcforge/subset.hpp"
#include "qmcforge/weights.hpp"
#include "qmcforge/lattice.hpp"
#include "qmcforge/bernoulli.hpp"
#include "qmcforge/merit_report.hpp"
#include "qmcforge/subset_sums.hpp"
#include "qmcforge/korobov_merit.hpp"
#include "qmcforge/lattice_cbc.hpp"
#include "qmcforge/gf_poly.hpp"
#include "qmcforge/walsh_merit.hpp"
#include "qmcforge/discrepancy.hpp"
#include "qmcforge/stability.hpp"
#include "qmcforge/io.hpp"

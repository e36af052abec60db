#pragma once

#include "ergolab/bootstrap.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/estimators.hpp"
#include "ergolab/hypotheses.hpp"
#include "ergolab/integrate.hpp"
#include "ergolab/models.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/polynomial.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/schedule.hpp"
#include "ergolab/schemes.hpp"
#include "ergolab/slln.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/transform.hpp"
#include "ergolab/version.hpp"

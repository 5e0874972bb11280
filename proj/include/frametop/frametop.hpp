#pragma once

#include "frametop/acceptance.hpp"
#include "frametop/errors.hpp"
#include "frametop/hermitian_core.hpp"
#include "frametop/homotopy.hpp"
#include "frametop/io.hpp"
#include "frametop/matrix.hpp"
#include "frametop/moment_flow.hpp"
#include "frametop/parallel.hpp"
#include "frametop/polytope.hpp"
#include "frametop/rng.hpp"
#include "frametop/schur_horn.hpp"
#include "frametop/strata.hpp"
#include "frametop/version.hpp"

#pragma once

#include "efp/errors.hpp"
#include "efp/grid.hpp"
#include "efp/fft.hpp"
#include "efp/spectral.hpp"
#include "efp/field_io.hpp"
#include "efp/quadrature.hpp"
#include "efp/potentials.hpp"
#include "efp/propagators.hpp"
#include "efp/reference.hpp"
#include "efp/experiments.hpp"
#include "efp/report.hpp"
#include "efp/output.hpp"
